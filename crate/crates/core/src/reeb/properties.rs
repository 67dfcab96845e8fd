use super::{Edge, ReebGraph, VertexKind};
use crate::strip::{slice, slice_between, RegionError, StripRegion};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: &'static str,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every non-cut vertex has degree 1, 2 or 3.
pub fn check_degree_bound(g: &ReebGraph) -> PropertyReport {
    let mut violations = Vec::new();
    for v in g.non_cut() {
        if !(1..=3).contains(&v.degree) {
            violations.push(format!(
                "vertex {} at height {} has degree {}",
                v.id, v.height, v.degree
            ));
        }
    }
    PropertyReport {
        name: "degree_bound",
        checked: g.non_cut().count(),
        violations,
    }
}

/// A non-cut vertex whose incident edges all leave on one side has degree 1.
pub fn check_extremum_law(g: &ReebGraph) -> PropertyReport {
    let mut violations = Vec::new();
    for v in g.non_cut() {
        let (down, up) = g.down_up(v.id);
        if (down == 0 || up == 0) && v.degree != 1 {
            violations.push(format!(
                "extremal vertex {} at height {} has degree {}",
                v.id, v.height, v.degree
            ));
        }
    }
    PropertyReport {
        name: "extremum_law",
        checked: g.non_cut().count(),
        violations,
    }
}

/// Along every edge, the slices at three interior levels meet the edge's
/// component in exactly one interval.
pub fn check_edge_monotonicity(g: &ReebGraph, region: &StripRegion) -> Result<PropertyReport, RegionError> {
    let mut violations = Vec::new();
    let mut checked = 0;
    for (k, e) in g.edges.iter().enumerate() {
        let (h0, h1) = (g.vertices[e.lo].height, g.vertices[e.hi].height);
        for frac in [0.25, 0.5, 0.75] {
            let t = h0 + frac * (h1 - h0);
            let Some(seg) = e.trace.iter().find(|s| s.band.0 < t && t < s.band.1) else {
                continue;
            };
            checked += 1;
            let anchor = 0.5 * (seg.interval[0] + seg.interval[1]);
            let slab = slice_between(region, t.min(seg.level), t.max(seg.level))?;
            let Some(comp) = slab.iter().find(|c| c.contains(anchor)) else {
                violations.push(format!("edge {k}: band interval lost at height {t}"));
                continue;
            };
            let hits = slice(region, t)?
                .intervals
                .iter()
                .filter(|iv| comp.contains(iv.mid()))
                .count();
            if hits != 1 {
                violations.push(format!("edge {k}: {hits} components at height {t}"));
            }
        }
    }
    Ok(PropertyReport {
        name: "edge_monotonicity",
        checked,
        violations,
    })
}

/// Removes non-cut vertices with one edge below and one above, joining
/// their edges. Ids are renumbered.
pub fn contract_pass_through(g: &ReebGraph) -> ReebGraph {
    let mut edges: Vec<Edge> = g.edges.clone();
    let mut alive = vec![true; g.vertices.len()];
    for v in &g.vertices {
        if v.kind == VertexKind::Cut {
            continue;
        }
        let down: Vec<usize> = (0..edges.len()).filter(|&k| edges[k].hi == v.id).collect();
        let up: Vec<usize> = (0..edges.len()).filter(|&k| edges[k].lo == v.id).collect();
        if down.len() == 1 && up.len() == 1 {
            let (d, u) = (down[0], up[0]);
            edges[d].hi = edges[u].hi;
            let tail = std::mem::take(&mut edges[u].trace);
            edges[d].trace.extend(tail);
            edges.remove(u);
            alive[v.id] = false;
        }
    }
    let mut renumber = vec![usize::MAX; g.vertices.len()];
    let mut vertices = Vec::new();
    for v in g.vertices.iter().filter(|v| alive[v.id]) {
        renumber[v.id] = vertices.len();
        let mut v = v.clone();
        v.id = vertices.len();
        vertices.push(v);
    }
    for e in &mut edges {
        e.lo = renumber[e.lo];
        e.hi = renumber[e.hi];
    }
    ReebGraph {
        vertices,
        edges,
        window: g.window,
    }
}
