//! Brute-force Reeb graph on a height/position grid and graph equivalence.
//!
//! The grid construction only evaluates `c1` and `c2` on a lattice; it
//! shares no code with the sweep.

use crate::reeb::{contract_pass_through, Edge, ReebGraph, Vertex, VertexKind};
use crate::strip::{RegionError, StripRegion};
use crate::Window;
use serde::{Deserialize, Serialize};

pub const DEFAULT_NT: usize = 4096;
pub const DEFAULT_NS: usize = 8192;
/// Search budget for the equivalence backtracking.
const SEARCH_LIMIT: usize = 1_000_000;

/// Lattice columns `[first, last]` inside the strip at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Run {
    pub first: usize,
    pub last: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridQuotient {
    pub levels: Vec<f64>,
    pub columns: Vec<f64>,
    pub runs: Vec<Vec<Run>>,
    /// `links[k]` joins runs of level `k` to runs of level `k + 1`.
    pub links: Vec<Vec<(usize, usize)>>,
    pub graph: ReebGraph,
}

struct Uf(Vec<usize>);

impl Uf {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (x, y) = (self.find(a), self.find(b));
        if x != y {
            self.0[x.max(y)] = x.min(y);
        }
    }
}

fn runs_at(t: f64, c1: &[f64], c2: &[f64]) -> Vec<Run> {
    let mut out = Vec::new();
    let mut start = None;
    for j in 0..c1.len() {
        let inside = c1[j] <= t && t <= c2[j];
        match (inside, start) {
            (true, None) => start = Some(j),
            (false, Some(a)) => {
                out.push(Run { first: a, last: j - 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        out.push(Run {
            first: a,
            last: c1.len() - 1,
        });
    }
    out
}

fn overlapping(lo: &[Run], hi: &[Run]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < lo.len() && j < hi.len() {
        if lo[i].first <= hi[j].last && hi[j].first <= lo[i].last {
            out.push((i, j));
        }
        if lo[i].last < hi[j].last {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Reeb graph of the height on the closed strip from `n_t` levels and
/// `n_s + 1` lattice columns.
pub fn grid_reeb(region: &StripRegion, window: Window, n_t: usize, n_s: usize) -> Result<GridQuotient, RegionError> {
    let columns = window.lattice(n_s);
    let mut c1 = Vec::with_capacity(columns.len());
    let mut c2 = Vec::with_capacity(columns.len());
    for &s in &columns {
        c1.push(region.c1.eval(s).map_err(|source| RegionError::Eval {
            which: 1,
            at: s,
            source,
        })?);
        c2.push(region.c2.eval(s).map_err(|source| RegionError::Eval {
            which: 2,
            at: s,
            source,
        })?);
    }
    let lo = c1.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = c2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let dt = (hi - lo) / n_t as f64;
    let levels: Vec<f64> = (0..n_t).map(|k| lo + (k as f64 + 0.5) * dt).collect();
    let runs: Vec<Vec<Run>> = levels.iter().map(|&t| runs_at(t, &c1, &c2)).collect();
    let links: Vec<Vec<(usize, usize)>> = runs.windows(2).map(|w| overlapping(&w[0], &w[1])).collect();

    let mut base = Vec::with_capacity(n_t);
    let mut total = 0;
    for r in &runs {
        base.push(total);
        total += r.len();
    }
    let mut uf = Uf((0..total).collect());
    let mut up_vertex = vec![usize::MAX; total];
    let mut down_vertex = vec![usize::MAX; total];
    let mut vertices: Vec<Vertex> = Vec::new();
    let last_col = columns.len() - 1;

    // Transition k joins level k - 1 to level k; the first and last are
    // against empty levels.
    for k in 0..=n_t {
        let below: &[Run] = if k > 0 { &runs[k - 1] } else { &[] };
        let above: &[Run] = if k < n_t { &runs[k] } else { &[] };
        let nb = below.len();
        let mut group = Uf((0..nb + above.len()).collect());
        if k > 0 && k < n_t {
            for &(i, j) in &links[k - 1] {
                group.union(i, nb + j);
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); nb + above.len()];
        for x in 0..nb + above.len() {
            let r = group.find(x);
            members[r].push(x);
        }
        let height = if k == 0 {
            lo
        } else if k == n_t {
            hi
        } else {
            0.5 * (levels[k - 1] + levels[k])
        };
        for m in members.iter().filter(|m| !m.is_empty()) {
            let (down, up): (Vec<usize>, Vec<usize>) = m.iter().partition(|&&x| x < nb);
            if down.len() == 1 && up.len() == 1 {
                uf.union(base[k - 1] + down[0], base[k] + up[0] - nb);
                continue;
            }
            let id = vertices.len();
            let mut first = usize::MAX;
            let mut last = 0;
            for &x in m {
                let run = if x < nb { below[x] } else { above[x - nb] };
                first = first.min(run.first);
                last = last.max(run.last);
            }
            for &x in &down {
                up_vertex[base[k - 1] + x] = id;
            }
            for &x in &up {
                down_vertex[base[k] + x - nb] = id;
            }
            let truncated = first == 0 || last == last_col;
            vertices.push(Vertex {
                id,
                height,
                kind: if truncated {
                    VertexKind::Cut
                } else {
                    VertexKind::Critical
                },
                degree: m.len(),
                footprint: [columns[first], columns[last]],
                truncated,
                items: Vec::new(),
            });
        }
    }

    let mut edge_of = vec![usize::MAX; total];
    let mut edges: Vec<Edge> = Vec::new();
    for node in 0..total {
        let r = uf.find(node);
        if edge_of[r] == usize::MAX {
            edge_of[r] = edges.len();
            edges.push(Edge {
                lo: usize::MAX,
                hi: usize::MAX,
                trace: Vec::new(),
            });
        }
        let e = &mut edges[edge_of[r]];
        if down_vertex[node] != usize::MAX {
            e.lo = down_vertex[node];
        }
        if up_vertex[node] != usize::MAX {
            e.hi = up_vertex[node];
        }
    }
    Ok(GridQuotient {
        levels,
        columns,
        runs,
        links,
        graph: ReebGraph {
            vertices,
            edges,
            window,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Vertex pairs `(id in g1, id in g2)` after contraction.
    pub mapping: Vec<(usize, usize)>,
    pub counts: [(usize, usize); 2],
    pub reason: Option<String>,
}

fn compatible(a: &Vertex, b: &Vertex, tol_h: f64, tol_s: f64) -> bool {
    a.kind == b.kind
        && (a.height - b.height).abs() <= tol_h
        && a.footprint[0] <= b.footprint[1] + tol_s
        && b.footprint[0] <= a.footprint[1] + tol_s
}

fn edge_multiset(g: &ReebGraph, map: impl Fn(usize) -> usize) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = g.edges.iter().map(|e| (map(e.lo), map(e.hi))).collect();
    e.sort_unstable();
    e
}

/// Height- and footprint-respecting isomorphism test after contracting
/// vertices with one edge below and one above. Footprints match with slack
/// `tol_s`.
pub fn graphs_equivalent_with(g1: &ReebGraph, g2: &ReebGraph, tol_h: f64, tol_s: f64) -> Equivalence {
    let (a, b) = (contract_pass_through(g1), contract_pass_through(g2));
    let counts = [(a.vertices.len(), b.vertices.len()), (a.edges.len(), b.edges.len())];
    let fail = |reason: String| Equivalence {
        equivalent: false,
        mapping: Vec::new(),
        counts,
        reason: Some(reason),
    };
    if counts[0].0 != counts[0].1 {
        return fail(format!("vertex counts differ: {} vs {}", counts[0].0, counts[0].1));
    }
    if counts[1].0 != counts[1].1 {
        return fail(format!("edge counts differ: {} vs {}", counts[1].0, counts[1].1));
    }
    let key = |g: &ReebGraph| {
        let mut o: Vec<usize> = (0..g.vertices.len()).collect();
        o.sort_by(|&x, &y| {
            let (p, q) = (&g.vertices[x], &g.vertices[y]);
            p.height
                .total_cmp(&q.height)
                .then(p.footprint[0].total_cmp(&q.footprint[0]))
        });
        o
    };
    let order = key(&a);
    let cands: Vec<Vec<usize>> = order
        .iter()
        .map(|&i| {
            let mut c: Vec<usize> = (0..b.vertices.len())
                .filter(|&j| compatible(&a.vertices[i], &b.vertices[j], tol_h, tol_s))
                .collect();
            c.sort_by(|&x, &y| {
                let h = a.vertices[i].height;
                (b.vertices[x].height - h)
                    .abs()
                    .total_cmp(&(b.vertices[y].height - h).abs())
            });
            c
        })
        .collect();
    if let Some(k) = cands.iter().position(|c| c.is_empty()) {
        let v = &a.vertices[order[k]];
        return fail(format!(
            "no match for vertex at height {} footprint {:?}",
            v.height, v.footprint
        ));
    }
    let target = edge_multiset(&b, |x| x);
    let mut assign = vec![usize::MAX; a.vertices.len()];
    let mut taken = vec![false; b.vertices.len()];
    let mut steps = 0;

    fn search(
        d: usize,
        order: &[usize],
        cands: &[Vec<usize>],
        assign: &mut [usize],
        taken: &mut [bool],
        steps: &mut usize,
        done: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if d == order.len() {
            return done(assign);
        }
        for &j in &cands[d] {
            *steps += 1;
            if taken[j] || *steps > SEARCH_LIMIT {
                continue;
            }
            taken[j] = true;
            assign[order[d]] = j;
            if search(d + 1, order, cands, assign, taken, steps, done) {
                return true;
            }
            taken[j] = false;
        }
        false
    }

    let done = |assign: &[usize]| edge_multiset(&a, |x| assign[x]) == target;
    if search(0, &order, &cands, &mut assign, &mut taken, &mut steps, &done) {
        Equivalence {
            equivalent: true,
            mapping: assign.iter().enumerate().map(|(i, &j)| (i, j)).collect(),
            counts,
            reason: None,
        }
    } else if steps > SEARCH_LIMIT {
        fail("search limit reached".into())
    } else {
        fail("no vertex bijection extends to an edge bijection".into())
    }
}

/// [`graphs_equivalent_with`] with footprint slack of 1e-3 of the window.
pub fn graphs_equivalent(g1: &ReebGraph, g2: &ReebGraph, tol_h: f64) -> Equivalence {
    graphs_equivalent_with(g1, g2, tol_h, 1e-3 * g1.window.width())
}

/// `2 (h_max - h_min) / n_t` for the grid's height range.
pub fn grid_tolerance(q: &GridQuotient) -> f64 {
    let n = q.levels.len();
    if n < 2 {
        return 0.0;
    }
    2.0 * (q.levels[1] - q.levels[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reeb::{build_reeb_graph, SweepOptions};
    use crate::strip::{make_region, TsFunction};

    fn region(c1: &str, c2: &str, w: Window) -> StripRegion {
        make_region(
            TsFunction::from_expr_text(c1).unwrap(),
            TsFunction::from_expr_text(c2).unwrap(),
            w,
        )
        .unwrap()
    }

    #[test]
    fn sine_grid_vertices() {
        let w = Window::symmetric(7.0);
        let q = grid_reeb(&region("sin(x)", "sin(x)+1", w), w, 1024, 4096).unwrap();
        q.graph.validate().unwrap();
        let tol = grid_tolerance(&q);
        let sig = q.graph.signature();
        let count = |h: f64, d: usize| sig.iter().filter(|&&(x, y)| (x - h).abs() <= tol && y == d).count();
        assert_eq!(count(-1.0, 1), 2);
        assert_eq!(count(0.0, 3), 2);
        assert_eq!(count(1.0, 3), 2);
        assert_eq!(count(2.0, 1), 2);
        assert_eq!(sig.len(), 8);
    }

    #[test]
    fn sweep_and_grid_agree_on_sine() {
        let w = Window::symmetric(7.0);
        let r = region("sin(x)", "sin(x)+1", w);
        let q = grid_reeb(&r, w, 1024, 4096).unwrap();
        let g = build_reeb_graph(&r, &SweepOptions::default()).unwrap();
        let eq = graphs_equivalent(&g, &q.graph, grid_tolerance(&q));
        assert!(eq.equivalent, "{eq:?}\n{:#?}\n{:#?}", g.vertices, q.graph.vertices);
        assert!(graphs_equivalent(&g, &g, 1e-12).equivalent);
    }

    #[test]
    fn constants_grid() {
        let w = Window::symmetric(3.0);
        let q = grid_reeb(&region("-1", "1", w), w, 256, 1024).unwrap();
        assert_eq!(q.graph.vertices.len(), 2);
        assert!(q.graph.vertices.iter().all(|v| v.kind == VertexKind::Cut));
        assert_eq!(q.graph.edges.len(), 1);
    }

    #[test]
    fn different_counts_are_reported() {
        let w = Window::symmetric(7.0);
        let a = build_reeb_graph(&region("sin(x)", "sin(x)+1", w), &SweepOptions::default()).unwrap();
        let b = build_reeb_graph(&region("-1", "1", w), &SweepOptions::default()).unwrap();
        let eq = graphs_equivalent(&a, &b, 1e-3);
        assert!(!eq.equivalent);
        assert!(eq.reason.unwrap().contains("counts"));
    }
}
