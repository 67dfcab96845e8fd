use super::{Edge, ReebError, ReebGraph, SweepOptions, TraceSegment, Vertex, VertexItem, VertexKind};
use crate::critical::Locus;
use crate::strip::{slice_between, RegionError, SliceInterval, StripRegion};

#[derive(Debug, Clone, Copy)]
enum Source {
    Item(VertexItem),
    /// Value of `c_which` at the left (`false`) or right (`true`) window edge.
    Corner {
        right: bool,
    },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    height: f64,
    source: Source,
}

struct Cluster {
    lo: f64,
    hi: f64,
    events: Vec<Event>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn locate(comps: &[SliceInterval], s: f64) -> Option<usize> {
    let k = comps.partition_point(|c| c.b < s);
    (k < comps.len() && comps[k].contains(s)).then_some(k)
}

fn overlaps(locus: &Locus, c: &SliceInterval) -> bool {
    locus.left() <= c.b && c.a <= locus.right()
}

/// Builds the Reeb graph by sweeping the height through the event values
/// (critical values of `c1`, `c2` and their values at the window edges).
pub fn build_reeb_graph(region: &StripRegion, opts: &SweepOptions) -> Result<ReebGraph, ReebError> {
    let (cs1, cs2) = region.critical_sets()?;
    let w = region.window;
    let ev = |which: u8, s: f64| {
        let f = if which == 1 { &region.c1 } else { &region.c2 };
        f.eval(s).map_err(|source| RegionError::Eval { which, at: s, source })
    };

    let mut events = Vec::new();
    for (which, cs) in [(1u8, cs1), (2u8, cs2)] {
        for it in &cs.items {
            events.push(Event {
                height: it.value,
                source: Source::Item(VertexItem {
                    which,
                    locus: it.locus,
                    value: it.value,
                }),
            });
        }
        for (right, s) in [(false, w.lo), (true, w.hi)] {
            events.push(Event {
                height: ev(which, s)?,
                source: Source::Corner { right },
            });
        }
    }
    events.sort_by(|a, b| a.height.total_cmp(&b.height));
    let mut clusters: Vec<Cluster> = Vec::new();
    for e in events {
        match clusters.last_mut() {
            Some(c) if e.height - c.hi <= opts.event_gap => {
                c.hi = e.height;
                c.events.push(e);
            }
            _ => clusters.push(Cluster {
                lo: e.height,
                hi: e.height,
                events: vec![e],
            }),
        }
    }

    // Band k lies between clusters k and k + 1.
    let n_bands = clusters.len() - 1;
    let mut band_levels = Vec::with_capacity(n_bands);
    let mut band_slices = Vec::with_capacity(n_bands);
    let mut seg_base = Vec::with_capacity(n_bands + 1);
    let mut n_segs = 0;
    for k in 0..n_bands {
        let m = 0.5 * (clusters[k].hi + clusters[k + 1].lo);
        let sl = slice_between(region, m, m)?;
        seg_base.push(n_segs);
        n_segs += sl.len();
        band_levels.push(m);
        band_slices.push(sl);
    }
    let mut uf = UnionFind((0..n_segs).collect());
    let mut seg_lo: Vec<Option<usize>> = vec![None; n_segs];
    let mut seg_hi: Vec<Option<usize>> = vec![None; n_segs];
    let mut vertices: Vec<Vertex> = Vec::new();

    for (k, cluster) in clusters.iter().enumerate() {
        let lo_level = if k > 0 { band_levels[k - 1] } else { cluster.lo - 1.0 };
        let hi_level = if k < n_bands { band_levels[k] } else { cluster.hi + 1.0 };
        let comps = slice_between(region, lo_level, hi_level)?;
        let mut below: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
        let mut above: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
        for (side, band) in [(&mut below, k.checked_sub(1)), (&mut above, (k < n_bands).then_some(k))] {
            let Some(b) = band else { continue };
            for (j, iv) in band_slices[b].iter().enumerate() {
                let c = locate(&comps, iv.mid()).ok_or(ReebError::Inconsistency {
                    height: band_levels[b],
                    at: iv.mid(),
                })?;
                side[c].push(seg_base[b] + j);
            }
        }

        for (c, comp) in comps.iter().enumerate() {
            let items: Vec<VertexItem> = cluster
                .events
                .iter()
                .filter_map(|e| match e.source {
                    Source::Item(it) if overlaps(&it.locus, comp) => Some(it),
                    _ => None,
                })
                .collect();
            let corners: Vec<&Event> = cluster
                .events
                .iter()
                .filter(|e| match e.source {
                    Source::Corner { right: false } => comp.a <= w.lo,
                    Source::Corner { right: true } => comp.b >= w.hi,
                    Source::Item(_) => false,
                })
                .collect();
            let (b, a) = (below[c].len(), above[c].len());
            if items.is_empty() && b == 1 && a == 1 {
                uf.union(below[c][0], above[c][0]);
                continue;
            }
            if items.is_empty() && corners.is_empty() {
                return Err(ReebError::Inconsistency {
                    height: 0.5 * (cluster.lo + cluster.hi),
                    at: comp.mid(),
                });
            }
            let height = if items.is_empty() {
                corners.iter().map(|e| e.height).sum::<f64>() / corners.len() as f64
            } else {
                let vmin = items.iter().map(|i| i.value).fold(f64::INFINITY, f64::min);
                let vmax = items.iter().map(|i| i.value).fold(f64::NEG_INFINITY, f64::max);
                if vmax - vmin > 1e-12 * vmax.abs().max(vmin.abs()) {
                    return Err(ReebError::DegenerateEvent {
                        values: items.iter().map(|i| i.value).collect(),
                        loci: items.iter().map(|i| i.locus.centre()).collect(),
                    });
                }
                0.5 * (vmin + vmax)
            };
            let anchor = match items.first() {
                Some(it) => it.locus.centre(),
                None => comp.mid(),
            };
            let eta = opts.footprint_slack;
            let fp = slice_between(region, height - eta, height + eta)?;
            let footprint = match fp
                .iter()
                .find(|iv| iv.contains(anchor) || iv.overlaps(comp) && items.is_empty())
            {
                Some(iv) => [iv.a, iv.b],
                None if items.is_empty() => [comp.a, comp.b],
                None => [anchor, anchor],
            };
            let truncated = footprint[0] <= w.lo || footprint[1] >= w.hi;
            let id = vertices.len();
            for &s in &below[c] {
                seg_hi[s] = Some(id);
            }
            for &s in &above[c] {
                seg_lo[s] = Some(id);
            }
            vertices.push(Vertex {
                id,
                height,
                kind: if truncated {
                    VertexKind::Cut
                } else {
                    VertexKind::Critical
                },
                degree: b + a,
                footprint,
                truncated,
                items,
            });
        }
    }

    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_of_root: Vec<Option<usize>> = vec![None; n_segs];
    for s in 0..n_segs {
        let r = uf.find(s);
        let e = match edge_of_root[r] {
            Some(e) => e,
            None => {
                edges.push(Edge {
                    lo: usize::MAX,
                    hi: usize::MAX,
                    trace: Vec::new(),
                });
                edge_of_root[r] = Some(edges.len() - 1);
                edges.len() - 1
            }
        };
        let band = seg_base.partition_point(|&b| b <= s) - 1;
        let iv = band_slices[band][s - seg_base[band]];
        edges[e].trace.push(TraceSegment {
            band: (clusters[band].hi, clusters[band + 1].lo),
            level: band_levels[band],
            interval: [iv.a, iv.b],
        });
        if let Some(v) = seg_lo[s] {
            edges[e].lo = v;
        }
        if let Some(v) = seg_hi[s] {
            edges[e].hi = v;
        }
    }
    if let Some(e) = edges.iter().find(|e| e.lo == usize::MAX || e.hi == usize::MAX) {
        let t = e.trace[0];
        return Err(ReebError::Inconsistency {
            height: t.level,
            at: 0.5 * (t.interval[0] + t.interval[1]),
        });
    }
    Ok(ReebGraph {
        vertices,
        edges,
        window: w,
    })
}
