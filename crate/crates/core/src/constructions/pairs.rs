use super::asymptotics::{verify_asymptotics_with, AsymptoticClaim, AsymptoticReport, Side, Target};
use super::{catalogue, Catalogue, ConstructionError};
use crate::critical::{find_critical_set, CriticalError};
use crate::expr::Expr;
use crate::strip::TsFunction;
use crate::{Tolerances, Window};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "4")]
    T4,
    #[serde(rename = "5a")]
    T5a,
    #[serde(rename = "5b")]
    T5b,
    #[serde(rename = "5c")]
    T5c,
    #[serde(rename = "6a")]
    T6a,
    #[serde(rename = "6b")]
    T6b,
    #[serde(rename = "6c")]
    T6c,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::T4,
        Theorem::T5a,
        Theorem::T5b,
        Theorem::T5c,
        Theorem::T6a,
        Theorem::T6b,
        Theorem::T6c,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::T4 => "4",
            Theorem::T5a => "5a",
            Theorem::T5b => "5b",
            Theorem::T5c => "5c",
            Theorem::T6a => "6a",
            Theorem::T6b => "6b",
            Theorem::T6c => "6c",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = ConstructionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| ConstructionError::Parameter(format!("unknown theorem `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PairParams {
    pub r: f64,
    pub p1: f64,
    pub p2: f64,
    /// Ascending coefficients of the polynomial denominator.
    pub p: Vec<f64>,
}

impl Default for PairParams {
    fn default() -> Self {
        PairParams {
            r: 1.0,
            p1: 0.0,
            p2: 1.0,
            p: vec![1.0, 0.0, 1.0],
        }
    }
}

/// Shape of a critical set as seen through expanding windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetShape {
    Empty,
    Unbounded,
    BoundedBelowUnboundedAbove,
}

struct Recipe {
    base: Catalogue,
    bump: Catalogue,
    c1_bump: f64,
}

fn recipe(theorem: Theorem, params: &PairParams) -> Recipe {
    let hyper = Catalogue::HyperbolaP1P2 {
        p1: params.p1,
        p2: params.p2,
    };
    // Parameters swapped so that the base tends to p1 at -inf and p2 at +inf.
    let logistic = Catalogue::Logistic {
        p1: params.p2,
        p2: params.p1,
    };
    let p0 = Catalogue::P0 { p: params.p.clone() };
    let p00 = Catalogue::P00 { p: params.p.clone() };
    let (base, bump, c1_bump) = match theorem {
        Theorem::T4 => (Catalogue::HyperbolaPlusInf { r: params.r }, p0, 0.0),
        Theorem::T5a => (hyper, p0, 0.0),
        Theorem::T5b => (hyper, p0, 0.5),
        Theorem::T5c => (hyper, p00, 0.5),
        Theorem::T6a => (logistic, Catalogue::E1, 0.0),
        Theorem::T6b => (logistic, Catalogue::E1, 0.5),
        Theorem::T6c => (logistic, Catalogue::E2, 0.5),
    };
    Recipe { base, bump, c1_bump }
}

/// `(c1, c2)` for the theorem: `c1 = base + k·bump`, `c2 = base + bump`
/// with `k` in `{0, 1/2}`.
pub fn build_pair(theorem: Theorem, params: &PairParams) -> Result<(TsFunction, TsFunction), ConstructionError> {
    let Recipe { base, bump, c1_bump } = recipe(theorem, params);
    let b = base.expr()?;
    let d = bump.expr()?;
    let c1 = if c1_bump == 0.0 {
        catalogue(&base)?
    } else {
        TsFunction::from_expr(b.clone() + Expr::constant(c1_bump) * d.clone())
    };
    Ok((c1, TsFunction::from_expr(b + d)))
}

/// Usable half-width of windows for the pair (overflow cap of the bump).
pub fn pair_cap(theorem: Theorem, params: &PairParams) -> f64 {
    let r = recipe(theorem, params);
    match r.bump {
        Catalogue::P0 { .. } => 18.0,
        other => other.overflow_cap().unwrap_or(f64::INFINITY),
    }
}

/// Presence of critical points in the two outer halves of a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellObservation {
    pub half_width: f64,
    /// `None` when evaluation failed.
    pub left: Option<bool>,
    pub right: Option<bool>,
    /// Any critical point in the whole window.
    pub any: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeCheck {
    pub expected: SetShape,
    pub observations: Vec<ShellObservation>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCheck {
    pub theorem: Theorem,
    pub sample_window: Window,
    pub min_separation: f64,
    pub separation_holds: bool,
    /// Expected open image interval and whether both sampled ranges lie in it.
    pub image: Option<((f64, f64), bool)>,
    pub ranges: [(f64, f64); 2],
    pub asymptotics: Vec<(String, AsymptoticReport)>,
    /// For `Theorem::T4`, the union of both critical sets is checked and both
    /// entries carry the same observations.
    pub shapes: [ShapeCheck; 2],
}

fn presence(f: &TsFunction, w: Window, tol: &Tolerances) -> Option<bool> {
    match find_critical_set(f, w, tol) {
        Ok(cs) => Some(!cs.is_empty()),
        Err(CriticalError::Accumulation { .. }) => Some(true),
        Err(CriticalError::Eval { .. }) => None,
    }
}

fn observe(fs: &[&TsFunction], half: f64, tol: &Tolerances) -> ShellObservation {
    let any_of = |w: Window| -> Option<bool> {
        let seen: Vec<Option<bool>> = fs.iter().map(|f| presence(f, w, tol)).collect();
        if seen.contains(&Some(true)) {
            Some(true)
        } else if seen.iter().all(|s| *s == Some(false)) {
            Some(false)
        } else {
            None
        }
    };
    ShellObservation {
        half_width: half,
        left: any_of(Window::new(-half, -0.5 * half)),
        right: any_of(Window::new(0.5 * half, half)),
        any: any_of(Window::symmetric(half)),
    }
}

fn shape_holds(expected: SetShape, obs: &[ShellObservation]) -> bool {
    obs.iter().all(|o| match expected {
        SetShape::Empty => o.any == Some(false),
        SetShape::Unbounded => o.left == Some(true) || o.right == Some(true),
        SetShape::BoundedBelowUnboundedAbove => o.right == Some(true) && o.left == Some(false),
    })
}

/// Checks the window-scale properties claimed for the theorem's pair over
/// the expanding half-widths `widths` (clamped to the overflow cap).
pub fn check_pair(
    theorem: Theorem,
    params: &PairParams,
    widths: &[f64],
    tol: &Tolerances,
) -> Result<PairCheck, ConstructionError> {
    let (c1, c2) = build_pair(theorem, params)?;
    let cap = pair_cap(theorem, params);
    let mut halves: Vec<f64> = widths.iter().map(|w| w.min(cap)).collect();
    halves.dedup();

    let sample_window = Window::symmetric(halves.iter().copied().fold(1.0, f64::max));
    let mut min_separation = f64::INFINITY;
    let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); 2];
    for s in sample_window.lattice(1 << 14) {
        let a = c1.eval(s).map_err(|source| ConstructionError::Eval { at: s, source })?;
        let b = c2.eval(s).map_err(|source| ConstructionError::Eval { at: s, source })?;
        min_separation = min_separation.min(b - a);
        for (r, v) in ranges.iter_mut().zip([a, b]) {
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }

    let (p1, p2) = (params.p1, params.p2);
    let image = match theorem {
        Theorem::T4 => None,
        Theorem::T5a | Theorem::T5b | Theorem::T5c => Some((p1, f64::INFINITY)),
        _ => Some((p1.min(p2), p1.max(p2))),
    }
    .map(|(lo, hi)| {
        let inside = ranges.iter().all(|&(a, b)| a > lo && b < hi);
        ((lo, hi), inside)
    });

    let (minus, plus) = match theorem {
        Theorem::T4 => (Target::PlusInf, Target::PlusInf),
        Theorem::T5a | Theorem::T5b | Theorem::T5c => (Target::Limit(p1), Target::PlusInf),
        _ => (Target::Limit(p1), Target::Limit(p2)),
    };
    let mut asymptotics = Vec::new();
    for (name, f) in [("c1", &c1), ("c2", &c2)] {
        for (side, target, label) in [(Side::MinusInf, minus, "-inf"), (Side::PlusInf, plus, "+inf")] {
            let claim = AsymptoticClaim { side, target };
            asymptotics.push((format!("{name} {label}"), verify_asymptotics_with(f, claim, 3..=12)));
        }
    }

    let expected = match theorem {
        Theorem::T4 => (SetShape::Unbounded, SetShape::Unbounded),
        Theorem::T5a | Theorem::T6a => (SetShape::Empty, SetShape::Unbounded),
        Theorem::T5b | Theorem::T6b => (SetShape::Unbounded, SetShape::Unbounded),
        Theorem::T5c | Theorem::T6c => (
            SetShape::BoundedBelowUnboundedAbove,
            SetShape::BoundedBelowUnboundedAbove,
        ),
    };
    let shapes = if theorem == Theorem::T4 {
        let obs: Vec<_> = halves.iter().map(|&h| observe(&[&c1, &c2], h, tol)).collect();
        let check = ShapeCheck {
            expected: expected.0,
            holds: shape_holds(expected.0, &obs),
            observations: obs,
        };
        [check.clone(), check]
    } else {
        [(&c1, expected.0), (&c2, expected.1)].map(|(f, e)| {
            let obs: Vec<_> = halves.iter().map(|&h| observe(&[f], h, tol)).collect();
            ShapeCheck {
                expected: e,
                holds: shape_holds(e, &obs),
                observations: obs,
            }
        })
    };

    Ok(PairCheck {
        theorem,
        sample_window,
        separation_holds: min_separation > 0.0,
        min_separation,
        image,
        ranges,
        asymptotics,
        shapes,
    })
}
