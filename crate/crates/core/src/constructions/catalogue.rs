use super::ConstructionError;
use crate::expr::{Expr, Func};
use serde::{Deserialize, Serialize};

fn default_p() -> Vec<f64> {
    vec![1.0, 0.0, 1.0]
}

/// Named closed-form functions. `p` is a polynomial given by ascending
/// coefficients (default `x^2 + 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name")]
pub enum Catalogue {
    #[serde(rename = "c_H_plus_inf_r")]
    HyperbolaPlusInf { r: f64 },
    #[serde(rename = "c_H_p1_p2")]
    HyperbolaP1P2 { p1: f64, p2: f64 },
    #[serde(rename = "c_e_p1_p2")]
    Logistic { p1: f64, p2: f64 },
    #[serde(rename = "c_p0")]
    P0 {
        #[serde(default = "default_p")]
        p: Vec<f64>,
    },
    #[serde(rename = "c_p00")]
    P00 {
        #[serde(default = "default_p")]
        p: Vec<f64>,
    },
    #[serde(rename = "c_e1")]
    E1,
    #[serde(rename = "c_e2")]
    E2,
    #[serde(rename = "gauss_sin")]
    GaussSin,
    #[serde(rename = "runge")]
    Runge { a1: f64, a2: f64 },
    #[serde(rename = "sin")]
    Sin,
    #[serde(rename = "const")]
    Const { k: f64 },
    #[serde(rename = "affine")]
    Affine { k: f64, b: f64 },
}

fn x() -> Expr {
    Expr::var()
}

fn c(v: f64) -> Expr {
    Expr::constant(v)
}

fn exp(e: Expr) -> Expr {
    Expr::call(Func::Exp, e)
}

fn sin(e: Expr) -> Expr {
    Expr::call(Func::Sin, e)
}

fn sqrt(e: Expr) -> Expr {
    Expr::call(Func::Sqrt, e)
}

/// Polynomial with ascending coefficients, zero terms omitted.
pub fn polynomial(coeffs: &[f64]) -> Expr {
    let mut terms = coeffs.iter().enumerate().filter(|(_, &a)| a != 0.0).map(|(i, &a)| {
        let mono = match i {
            0 => return c(a),
            1 => x(),
            _ => x().powi(i as i32),
        };
        if a == 1.0 {
            mono
        } else {
            c(a) * mono
        }
    });
    match terms.next() {
        None => c(0.0),
        Some(first) => terms.fold(first, |acc, t| acc + t),
    }
}

fn check_p(p: &[f64]) -> Result<(), ConstructionError> {
    let bad = |m: &str| Err(ConstructionError::Parameter(format!("p: {m}")));
    let deg = match p.iter().rposition(|&a| a != 0.0) {
        Some(d) => d,
        None => return bad("zero polynomial"),
    };
    if deg % 2 == 1 || p[deg] < 0.0 {
        return bad("must be positive, so of even degree with positive leading coefficient");
    }
    if p.iter().any(|a| !a.is_finite()) {
        return bad("non-finite coefficient");
    }
    let e = polynomial(p);
    for k in 0..=4096 {
        let s = -64.0 + k as f64 / 32.0;
        if e.eval(s).map_or(true, |v| v <= 0.0) {
            return Err(ConstructionError::Parameter(format!("p is not positive at x = {s}")));
        }
    }
    Ok(())
}

fn oscillating(inner: Expr, denom: Expr) -> Expr {
    (c(2.0) + sin(exp(inner))) / denom
}

impl Catalogue {
    pub fn name(&self) -> &'static str {
        match self {
            Catalogue::HyperbolaPlusInf { .. } => "c_H_plus_inf_r",
            Catalogue::HyperbolaP1P2 { .. } => "c_H_p1_p2",
            Catalogue::Logistic { .. } => "c_e_p1_p2",
            Catalogue::P0 { .. } => "c_p0",
            Catalogue::P00 { .. } => "c_p00",
            Catalogue::E1 => "c_e1",
            Catalogue::E2 => "c_e2",
            Catalogue::GaussSin => "gauss_sin",
            Catalogue::Runge { .. } => "runge",
            Catalogue::Sin => "sin",
            Catalogue::Const { .. } => "const",
            Catalogue::Affine { .. } => "affine",
        }
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        let fail = |m: String| Err(ConstructionError::Parameter(m));
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        match self {
            Catalogue::HyperbolaPlusInf { r } if !(*r > 0.0 && r.is_finite()) => {
                fail(format!("c_H_plus_inf_r needs r > 0 (got {r})"))
            }
            Catalogue::HyperbolaP1P2 { p1, p2 } if !(finite(&[*p1, *p2]) && *p2 > 0.0) => {
                fail(format!("c_H_p1_p2 needs p2 > 0 (got {p2})"))
            }
            Catalogue::Logistic { p1, p2 } if !(finite(&[*p1, *p2]) && p1 != p2) => {
                fail(format!("c_e_p1_p2 needs p1 != p2 (got {p1}, {p2})"))
            }
            Catalogue::P0 { p } | Catalogue::P00 { p } => check_p(p),
            Catalogue::Runge { a1, a2 } if !(finite(&[*a1, *a2]) && *a1 > 0.0 && *a2 >= 0.0) => {
                fail(format!("runge needs a1 > 0 and a2 >= 0 (got {a1}, {a2})"))
            }
            Catalogue::Const { k } if !k.is_finite() => fail("const needs a finite k".into()),
            Catalogue::Affine { k, b } if !finite(&[*k, *b]) => fail("affine needs finite k and b".into()),
            _ => Ok(()),
        }
    }

    /// The closed form, after validating parameters.
    pub fn expr(&self) -> Result<Expr, ConstructionError> {
        self.validate()?;
        Ok(match self {
            Catalogue::HyperbolaPlusInf { r } => sqrt(c(1.0) + c(*r) * x().powi(2)),
            Catalogue::HyperbolaP1P2 { p1, p2 } => c(*p1) + (x() + sqrt(x().powi(2) + c(4.0 * p2))) / c(2.0),
            Catalogue::Logistic { p1, p2 } => (c(*p1) * exp(x()) + c(*p2)) / (exp(x()) + c(1.0)),
            Catalogue::P0 { p } => oscillating(x().powi(2), polynomial(p)),
            Catalogue::P00 { p } => oscillating(x(), polynomial(p)),
            Catalogue::E1 => oscillating(x().powi(4), exp(x().powi(2))),
            Catalogue::E2 => oscillating(x().powi(3), exp(x().powi(2))),
            Catalogue::GaussSin => exp(-x().powi(2)) * sin(x()),
            Catalogue::Runge { a1, a2 } => c(*a1) / (x().powi(2) + c(1.0)) + c(*a2),
            Catalogue::Sin => sin(x()),
            Catalogue::Const { k } => c(*k),
            Catalogue::Affine { k, b } => c(*k) * x() + c(*b),
        })
    }

    /// Largest `|x|` at which evaluation stays clear of `exp` overflow, if
    /// the entry has such a limit.
    pub fn overflow_cap(&self) -> Option<f64> {
        match self {
            Catalogue::P0 { .. } => Some(26.0),
            Catalogue::P00 { .. } | Catalogue::Logistic { .. } => Some(690.0),
            Catalogue::E1 | Catalogue::E2 => Some(3.6),
            _ => None,
        }
    }
}
