use super::{print, BinOp, Expr, Func};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

/// Arguments of `exp` above this evaluate to a distinguished overflow result.
pub const EXP_OVERFLOW_ARG: f64 = 700.0;

/// Order-2 jet of a scalar function at a point: value, first and second
/// derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },
    #[error("overflow in `{node}`")]
    Overflow { node: String },
}

impl EvalError {
    pub fn is_overflow(&self) -> bool {
        matches!(self, EvalError::Overflow { .. })
    }
}

impl Jet2 {
    pub const fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet2 { value, d1, d2 }
    }

    pub const fn constant(value: f64) -> Self {
        Jet2::new(value, 0.0, 0.0)
    }

    /// The identity jet `x ↦ x` at `x`.
    pub const fn variable(x: f64) -> Self {
        Jet2::new(x, 1.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Composes an outer function, given its own jet `(f(g), f'(g), f''(g))`
    /// at the inner value, with this inner jet.
    pub fn compose(self, outer: Jet2) -> Jet2 {
        Jet2::new(
            outer.value,
            outer.d1 * self.d1,
            outer.d2 * self.d1 * self.d1 + outer.d1 * self.d2,
        )
    }

    pub fn scale(self, k: f64) -> Jet2 {
        Jet2::new(k * self.value, k * self.d1, k * self.d2)
    }

    pub fn sin(self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.compose(Jet2::new(s, c, -s))
    }

    pub fn cos(self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.compose(Jet2::new(c, -s, -c))
    }

    pub fn exp(self) -> Jet2 {
        let e = self.value.exp();
        self.compose(Jet2::new(e, e, e))
    }

    /// Requires a positive value.
    pub fn sqrt(self) -> Jet2 {
        let r = self.value.sqrt();
        self.compose(Jet2::new(r, 0.5 / r, -0.25 / (r * self.value)))
    }

    pub fn atan(self) -> Jet2 {
        let g = self.value;
        let q = 1.0 + g * g;
        self.compose(Jet2::new(g.atan(), 1.0 / q, -2.0 * g / (q * q)))
    }

    pub fn powi(self, n: i32) -> Jet2 {
        match n {
            0 => Jet2::constant(1.0),
            1 => self,
            _ => {
                let g = self.value;
                let nf = f64::from(n);
                self.compose(Jet2::new(
                    g.powi(n),
                    nf * g.powi(n - 1),
                    nf * (nf - 1.0) * g.powi(n - 2),
                ))
            }
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        let q = self.value / o.value;
        let q1 = (self.d1 - q * o.d1) / o.value;
        let q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.value;
        Jet2::new(q, q1, q2)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2::new(-self.value, -self.d1, -self.d2)
    }
}

fn domain(e: &Expr, reason: &'static str) -> EvalError {
    EvalError::Domain { node: print(e), reason }
}

fn checked(e: &Expr, j: Jet2) -> Result<Jet2, EvalError> {
    if j.is_finite() {
        Ok(j)
    } else {
        Err(EvalError::Overflow { node: print(e) })
    }
}

/// Evaluates `(f(x), f'(x), f''(x))` for the expression at `x`.
///
/// Division by zero, `sqrt` of a non-positive value and zero raised to a
/// negative power are domain errors. `exp` of an argument above
/// [`EXP_OVERFLOW_ARG`], or any non-finite intermediate, is an overflow.
pub fn eval_jet2(e: &Expr, x: f64) -> Result<Jet2, EvalError> {
    let j = match e {
        Expr::Const(v) => Jet2::constant(*v),
        Expr::Named(n) => Jet2::constant(n.value()),
        Expr::Var => Jet2::variable(x),
        Expr::Neg(a) => -eval_jet2(a, x)?,
        Expr::Binary(op, a, b) => {
            let ja = eval_jet2(a, x)?;
            let jb = eval_jet2(b, x)?;
            match op {
                BinOp::Add => ja + jb,
                BinOp::Sub => ja - jb,
                BinOp::Mul => ja * jb,
                BinOp::Div => {
                    if jb.value == 0.0 {
                        return Err(domain(e, "division by zero"));
                    }
                    ja / jb
                }
            }
        }
        Expr::Pow(a, n) => {
            let ja = eval_jet2(a, x)?;
            if *n < 0 && ja.value == 0.0 {
                return Err(domain(e, "zero to a negative power"));
            }
            ja.powi(*n)
        }
        Expr::Call(f, a) => {
            let ja = eval_jet2(a, x)?;
            match f {
                Func::Sin => ja.sin(),
                Func::Cos => ja.cos(),
                Func::Atan => ja.atan(),
                Func::Exp => {
                    if ja.value > EXP_OVERFLOW_ARG {
                        return Err(EvalError::Overflow { node: print(e) });
                    }
                    ja.exp()
                }
                Func::Sqrt => {
                    if ja.value <= 0.0 {
                        return Err(domain(e, "sqrt of a non-positive value"));
                    }
                    ja.sqrt()
                }
            }
        }
    };
    checked(e, j)
}
