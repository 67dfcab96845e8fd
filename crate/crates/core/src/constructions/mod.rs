//! Function constructions: the closed-form catalogue, graph rotation, the
//! pairs built from them, and checks of their asymptotic claims.

mod asymptotics;
mod catalogue;
mod pairs;
mod rotate;

pub use asymptotics::{
    derivative_tail, divergence_witnesses, verify_asymptotics, verify_asymptotics_with, AsymptoticClaim,
    AsymptoticReport, AsymptoticVerdict, Branch, DivergenceWitness, Side, Target, DEFAULT_PROBES,
};
pub use catalogue::{polynomial, Catalogue};
pub use pairs::{build_pair, check_pair, PairCheck, PairParams, SetShape, Theorem};
pub use rotate::{BoundsCheck, RotatedGraph, TABLE_NODES};

use crate::critical::{derivative_level_set, find_critical_set, CriticalError};
use crate::expr::EvalError;
use crate::strip::{FunctionSource, TsFunction};
use crate::{Tolerances, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("u(x) is not strictly increasing near x = {at} (c0' = {slope}, needs > {limit})")]
    NotMonotone { at: f64, slope: f64, limit: f64 },
    #[error("evaluation failed at x = {at}: {source}")]
    Eval { at: f64, source: EvalError },
    #[error(transparent)]
    Critical(#[from] CriticalError),
}

fn default_x_window() -> Window {
    Window::symmetric(8192.0)
}

/// Serializable recipe for a construction-backed function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ConstructionSpec {
    Rotate {
        c0: Box<FunctionSource>,
        a_c: f64,
        /// `(a_cm, a_cM)`.
        bounds: (f64, f64),
        #[serde(default = "default_x_window")]
        x_window: Window,
    },
    Catalogue(Catalogue),
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<TsFunction, ConstructionError> {
        match self {
            ConstructionSpec::Rotate {
                c0,
                a_c,
                bounds,
                x_window,
            } => rotate_graph(&TsFunction::from_source(c0)?, *a_c, *bounds, *x_window),
            ConstructionSpec::Catalogue(entry) => catalogue(entry),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ConstructionSpec::Rotate { c0, a_c, .. } => {
                let inner = TsFunction::from_source(c0)
                    .map(|f| f.label())
                    .unwrap_or_else(|_| "?".into());
                format!("rotate({inner}, a_c={a_c})")
            }
            ConstructionSpec::Catalogue(entry) => {
                let v = serde_json::to_value(entry).unwrap_or_default();
                let params: Vec<String> = v
                    .as_object()
                    .into_iter()
                    .flatten()
                    .filter(|(k, _)| k.as_str() != "name")
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                if params.is_empty() {
                    entry.name().to_string()
                } else {
                    format!("{}({})", entry.name(), params.join(", "))
                }
            }
        }
    }
}

/// The catalogue entry as a function whose recorded source is the entry.
pub fn catalogue(entry: &Catalogue) -> Result<TsFunction, ConstructionError> {
    let f = TsFunction::from_expr(entry.expr()?);
    Ok(f.with_source(FunctionSource::Construction {
        construction: ConstructionSpec::Catalogue(entry.clone()),
        offset: 0.0,
    }))
}

/// Rotates the graph `{(c0(x), x)}` by `atan(a_c)`; `x_window` is the
/// preimage range covered by the lookup table.
pub fn rotate_graph(
    c0: &TsFunction,
    a_c: f64,
    bounds: (f64, f64),
    x_window: Window,
) -> Result<TsFunction, ConstructionError> {
    let graph = RotatedGraph::new(c0.clone(), a_c, bounds, x_window)?;
    let spec = ConstructionSpec::Rotate {
        c0: Box::new(c0.source().clone()),
        a_c,
        bounds,
        x_window,
    };
    Ok(TsFunction::from_rotated(graph, spec))
}

/// Largest distortion of pairwise distances between graph points of `c0`
/// and their images on the graph of the rotated function, over `pairs`
/// random pairs of preimage parameters in `xw`.
pub fn isometry_defect(rotated: &TsFunction, xw: Window, pairs: usize, seed: u64) -> Result<f64, ConstructionError> {
    let g = rotated
        .rotated()
        .ok_or_else(|| ConstructionError::Parameter("not a rotated function".into()))?;
    let c0 = g.c0();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ev = |f: &TsFunction, s: f64| f.eval(s).map_err(|source| ConstructionError::Eval { at: s, source });
    let image = |x: f64| -> Result<[(f64, f64); 2], ConstructionError> {
        let u = g
            .u_of_x(x)
            .map_err(|source| ConstructionError::Eval { at: x, source })?;
        Ok([(ev(c0, x)?, x), (ev(rotated, u)?, u)])
    };
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = rng.random_range(xw.lo..=xw.hi);
        let y = rng.random_range(xw.lo..=xw.hi);
        let [p, pu] = image(x)?;
        let [q, qu] = image(y)?;
        let before = (p.0 - q.0).hypot(p.1 - q.1);
        let after = (pu.0 - qu.0).hypot(pu.1 - qu.1);
        worst = worst.max((before - after).abs());
    }
    Ok(worst)
}

/// Both directions of the correspondence between critical points of the
/// rotated function on `uw` and solutions of `c0' = a_c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correspondence {
    pub critical_points: Vec<f64>,
    pub preimages: Vec<f64>,
    pub level_points: Vec<f64>,
    /// Largest `|c0'(x(u)) - a_c|` over critical points `u`.
    pub forward_defect: f64,
    /// Largest distance from `u(x)`, `x` a level point, to the nearest
    /// critical point.
    pub backward_defect: f64,
    pub counts_match: bool,
}

pub fn critical_correspondence(
    rotated: &TsFunction,
    uw: Window,
    tol: &Tolerances,
) -> Result<Correspondence, ConstructionError> {
    let g = rotated
        .rotated()
        .ok_or_else(|| ConstructionError::Parameter("not a rotated function".into()))?;
    let cs = find_critical_set(rotated, uw, tol)?;
    let critical_points: Vec<f64> = cs.items.iter().map(|i| i.locus.centre()).collect();
    let eval = |at: f64, r: Result<f64, EvalError>| r.map_err(|source| ConstructionError::Eval { at, source });
    let mut preimages = Vec::new();
    let mut forward_defect: f64 = 0.0;
    for &u in &critical_points {
        let x = eval(u, g.x_of_u(u))?;
        let slope = eval(x, g.c0().jet(x).map(|j| j.d1))?;
        forward_defect = forward_defect.max((slope - g.a_c()).abs());
        preimages.push(x);
    }
    let xw = Window::new(eval(uw.lo, g.x_of_u(uw.lo))?, eval(uw.hi, g.x_of_u(uw.hi))?);
    let level_points = derivative_level_set(g.c0(), g.a_c(), xw, tol)?;
    let mut backward_defect: f64 = 0.0;
    for &x in &level_points {
        let u = eval(x, g.u_of_x(x))?;
        let d = critical_points
            .iter()
            .map(|&c| (c - u).abs())
            .fold(f64::INFINITY, f64::min);
        backward_defect = backward_defect.max(d);
    }
    Ok(Correspondence {
        counts_match: critical_points.len() == level_points.len(),
        critical_points,
        preimages,
        level_points,
        forward_defect,
        backward_defect,
    })
}
