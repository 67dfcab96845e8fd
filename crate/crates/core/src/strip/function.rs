use crate::constructions::{ConstructionError, ConstructionSpec, RotatedGraph};
use crate::expr::{eval_jet2, parse, EvalError, Expr, Jet2, ParseError};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Serializable description of a function, replayable to an identical
/// [`TsFunction`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSource {
    Expr {
        expr: Expr,
    },
    Construction {
        construction: ConstructionSpec,
        #[serde(default, skip_serializing_if = "is_zero")]
        offset: f64,
    },
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone)]
enum Backing {
    Expr(Expr),
    Rotated(Arc<RotatedGraph>),
}

/// A smooth function of one variable backed by an expression or by a
/// construction without a closed form.
#[derive(Debug, Clone)]
pub struct TsFunction {
    backing: Backing,
    offset: f64,
    source: FunctionSource,
}

impl TsFunction {
    pub fn from_expr(expr: Expr) -> TsFunction {
        TsFunction {
            source: FunctionSource::Expr { expr: expr.clone() },
            backing: Backing::Expr(expr),
            offset: 0.0,
        }
    }

    pub fn from_expr_text(text: &str) -> Result<TsFunction, ParseError> {
        parse(text).map(TsFunction::from_expr)
    }

    pub fn from_source(source: &FunctionSource) -> Result<TsFunction, ConstructionError> {
        match source {
            FunctionSource::Expr { expr } => Ok(TsFunction::from_expr(expr.clone())),
            FunctionSource::Construction { construction, offset } => Ok(construction.build()?.shifted(*offset)),
        }
    }

    pub(crate) fn from_rotated(graph: RotatedGraph, spec: ConstructionSpec) -> TsFunction {
        TsFunction {
            backing: Backing::Rotated(Arc::new(graph)),
            offset: 0.0,
            source: FunctionSource::Construction {
                construction: spec,
                offset: 0.0,
            },
        }
    }

    /// Replaces the recorded source, keeping the backing.
    pub(crate) fn with_source(mut self, source: FunctionSource) -> TsFunction {
        self.source = source;
        self
    }

    pub fn jet(&self, s: f64) -> Result<Jet2, EvalError> {
        let j = match &self.backing {
            Backing::Expr(e) => eval_jet2(e, s)?,
            Backing::Rotated(g) => g.jet(s)?,
        };
        Ok(Jet2::new(j.value + self.offset, j.d1, j.d2))
    }

    pub fn eval(&self, s: f64) -> Result<f64, EvalError> {
        self.jet(s).map(|j| j.value)
    }

    /// `self + k`.
    pub fn shifted(&self, k: f64) -> TsFunction {
        if k == 0.0 {
            return self.clone();
        }
        match &self.backing {
            Backing::Expr(e) => TsFunction::from_expr(e.clone() + k),
            Backing::Rotated(_) => {
                let mut f = self.clone();
                f.offset += k;
                if let FunctionSource::Construction { offset, .. } = &mut f.source {
                    *offset += k;
                }
                f
            }
        }
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.backing {
            Backing::Expr(e) => Some(e),
            Backing::Rotated(_) => None,
        }
    }

    pub fn rotated(&self) -> Option<&RotatedGraph> {
        match &self.backing {
            Backing::Rotated(g) => Some(g),
            Backing::Expr(_) => None,
        }
    }

    pub fn source(&self) -> &FunctionSource {
        &self.source
    }

    /// Short human-readable name: the expression text, or the construction.
    pub fn label(&self) -> String {
        match (&self.backing, &self.source) {
            (Backing::Expr(e), FunctionSource::Expr { .. }) => e.to_string(),
            (_, FunctionSource::Construction { construction, offset }) => {
                if *offset == 0.0 {
                    construction.label()
                } else {
                    format!("{}{:+}", construction.label(), offset)
                }
            }
            (Backing::Rotated(_), FunctionSource::Expr { expr }) => expr.to_string(),
        }
    }
}

impl From<Expr> for TsFunction {
    fn from(e: Expr) -> Self {
        TsFunction::from_expr(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_is_bit_reproducible() {
        let f = TsFunction::from_expr_text("exp(-x^2)*sin(x)").unwrap();
        let g = TsFunction::from_source(f.source()).unwrap();
        for k in 0..50 {
            let s = -3.0 + 0.123 * k as f64;
            assert_eq!(f.jet(s).unwrap(), g.jet(s).unwrap());
        }
    }

    #[test]
    fn shift_adds_constant() {
        let f = TsFunction::from_expr_text("sin(x)").unwrap().shifted(1.0);
        assert_eq!(f.label(), "sin(x)+1");
        let j = f.jet(0.0).unwrap();
        assert_eq!(j, Jet2::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn source_round_trips_through_json() {
        let f = TsFunction::from_expr_text("atan(x)/2").unwrap();
        let text = serde_json::to_string(f.source()).unwrap();
        let back: FunctionSource = serde_json::from_str(&text).unwrap();
        assert_eq!(&back, f.source());
    }
}
