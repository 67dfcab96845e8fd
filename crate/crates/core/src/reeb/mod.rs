//! Reeb graphs of the height function on a strip region.

mod cw;
mod export;
mod predict;
mod properties;
mod sweep;

pub use cw::{check_cw_hypotheses, CwReport, CwTolerances, CwVerdicts, CwWarning};
pub use export::{export, to_dot, to_json, to_svg, ExportFormat};
pub use predict::{
    compare_prediction, predict_mthm2, PredictError, PredictedVertex, PredictedVertices, PredictionMatch,
};
pub use properties::{
    check_degree_bound, check_edge_monotonicity, check_extremum_law, contract_pass_through, PropertyReport,
};
pub use sweep::build_reeb_graph;

use crate::critical::Locus;
use crate::strip::RegionError;
use crate::Window;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Critical,
    Cut,
}

/// A critical point of `c1` or `c2` carried by a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexItem {
    pub which: u8,
    pub locus: Locus,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub height: f64,
    pub kind: VertexKind,
    pub degree: usize,
    pub footprint: [f64; 2],
    /// The footprint touches the window edge, so the degree is window-limited.
    pub truncated: bool,
    #[serde(skip)]
    pub items: Vec<VertexItem>,
}

/// One band-midpoint interval traversed by an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSegment {
    /// Open height range of the band.
    pub band: (f64, f64),
    pub level: f64,
    pub interval: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub lo: usize,
    pub hi: usize,
    #[serde(skip)]
    pub trace: Vec<TraceSegment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReebGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub window: Window,
}

impl ReebGraph {
    pub fn non_cut(&self) -> impl Iterator<Item = &Vertex> + '_ {
        self.vertices.iter().filter(|v| v.kind != VertexKind::Cut)
    }

    /// Numbers of incident edges going down and up from vertex `id`.
    pub fn down_up(&self, id: usize) -> (usize, usize) {
        let down = self.edges.iter().filter(|e| e.hi == id).count();
        let up = self.edges.iter().filter(|e| e.lo == id).count();
        (down, up)
    }

    /// `(height, degree)` of non-cut vertices, sorted.
    pub fn signature(&self) -> Vec<(f64, usize)> {
        let mut sig: Vec<(f64, usize)> = self.non_cut().map(|v| (v.height, v.degree)).collect();
        sig.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        sig
    }

    /// Checks the structural invariants: edge orientation, degree fields,
    /// and ids equal to positions.
    pub fn validate(&self) -> Result<(), String> {
        for (k, v) in self.vertices.iter().enumerate() {
            if v.id != k {
                return Err(format!("vertex at position {k} has id {}", v.id));
            }
            let (d, u) = self.down_up(k);
            if d + u != v.degree {
                return Err(format!("vertex {k}: degree {} but {} incident edges", v.degree, d + u));
            }
            if (v.kind == VertexKind::Cut) != v.truncated {
                return Err(format!("vertex {k}: kind and truncated flag disagree"));
            }
        }
        for e in &self.edges {
            let (a, b) = (&self.vertices[e.lo], &self.vertices[e.hi]);
            if a.height.partial_cmp(&b.height) != Some(std::cmp::Ordering::Less) {
                return Err(format!("edge {} -> {} is not oriented upwards", e.lo, e.hi));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// Event heights closer than this are processed together.
    pub event_gap: f64,
    /// Height slack when computing vertex footprints.
    pub footprint_slack: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            event_gap: 1e-7,
            footprint_slack: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReebError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("component count changes at height {height} near s = {at} without a critical point")]
    Inconsistency { height: f64, at: f64 },
    #[error("distinct critical values {values:?} within one event at s = {loci:?}")]
    DegenerateEvent { values: Vec<f64>, loci: Vec<f64> },
}
