use super::ConstructionError;
use crate::expr::{EvalError, Jet2};
use crate::roots::refine_root;
use crate::strip::TsFunction;
use crate::Window;
use serde::Serialize;

/// Number of lookup-table nodes.
pub const TABLE_NODES: usize = 1 << 12;
/// Number of lattice points in the monotonicity check.
const CHECK_POINTS: usize = 1 << 18;
/// Smallest accepted `du/dx`; below it the rotated graph has a (near)
/// vertical tangent.
const MIN_DU: f64 = 1e-6;

/// Result of the lattice check of `-1/a_cM <= c0' <= a_cm`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsCheck {
    pub min_slope: f64,
    pub max_slope: f64,
    pub holds: bool,
}

/// The graph `{(c0(x), x)}` rotated by `theta = atan(a_c)` about the origin,
/// read as the graph `{(c1(u), u)}` of a new function.
#[derive(Debug, Clone)]
pub struct RotatedGraph {
    c0: TsFunction,
    a_c: f64,
    sin: f64,
    cos: f64,
    xs: Vec<f64>,
    us: Vec<f64>,
    bounds: BoundsCheck,
}

impl RotatedGraph {
    /// Builds the rotation over the preimage window `xw`.
    pub fn new(c0: TsFunction, a_c: f64, bounds: (f64, f64), xw: Window) -> Result<RotatedGraph, ConstructionError> {
        let (a_cm, a_cm_upper) = bounds;
        if !(a_c > 0.0 && a_c < a_cm_upper) {
            return Err(ConstructionError::Parameter(format!(
                "rotation needs 0 < a_c < a_cM (got a_c = {a_c}, a_cM = {a_cm_upper})"
            )));
        }
        if !(a_cm > 0.0 && a_cm < a_cm_upper) {
            return Err(ConstructionError::Parameter(format!(
                "rotation needs 0 < a_cm < a_cM (got {a_cm}, {a_cm_upper})"
            )));
        }
        let theta = a_c.atan();
        let (sin, cos) = theta.sin_cos();
        let eval = |x: f64| c0.jet(x).map_err(|source| ConstructionError::Eval { at: x, source });

        let mut min_slope = f64::INFINITY;
        let mut max_slope = f64::NEG_INFINITY;
        for x in xw.lattice(CHECK_POINTS) {
            let j = eval(x)?;
            min_slope = min_slope.min(j.d1);
            max_slope = max_slope.max(j.d1);
            if j.d1 * sin + cos <= MIN_DU {
                return Err(ConstructionError::NotMonotone {
                    at: x,
                    slope: j.d1,
                    limit: -1.0 / a_c,
                });
            }
        }
        let bounds = BoundsCheck {
            min_slope,
            max_slope,
            holds: -1.0 / a_cm_upper <= min_slope && max_slope <= a_cm,
        };

        let xs = xw.lattice(TABLE_NODES - 1);
        let mut us = Vec::with_capacity(xs.len());
        for &x in &xs {
            us.push(eval(x)?.value * sin + x * cos);
        }
        if let Some(k) = us.windows(2).position(|w| w[1] <= w[0]) {
            return Err(ConstructionError::NotMonotone {
                at: xs[k],
                slope: f64::NAN,
                limit: -1.0 / a_c,
            });
        }
        Ok(RotatedGraph {
            c0,
            a_c,
            sin,
            cos,
            xs,
            us,
            bounds,
        })
    }

    pub fn a_c(&self) -> f64 {
        self.a_c
    }

    pub fn c0(&self) -> &TsFunction {
        &self.c0
    }

    pub fn bounds_check(&self) -> BoundsCheck {
        self.bounds
    }

    /// Range of `u` covered by the lookup table.
    pub fn u_window(&self) -> Window {
        Window::new(self.us[0], *self.us.last().unwrap())
    }

    pub fn x_window(&self) -> Window {
        Window::new(self.xs[0], *self.xs.last().unwrap())
    }

    /// `u(x) = c0(x) sin(theta) + x cos(theta)`.
    pub fn u_of_x(&self, x: f64) -> Result<f64, EvalError> {
        Ok(self.c0.eval(x)? * self.sin + x * self.cos)
    }

    /// Rotation of the plane point `(p1, p2)`.
    pub fn rotate_point(&self, p: (f64, f64)) -> (f64, f64) {
        (p.0 * self.cos - p.1 * self.sin, p.0 * self.sin + p.1 * self.cos)
    }

    /// Preimage parameter `x` with `u(x) = u`.
    pub fn x_of_u(&self, u: f64) -> Result<f64, EvalError> {
        let n = self.us.len();
        if !(u >= self.us[0] && u <= self.us[n - 1]) {
            return Err(EvalError::Domain {
                node: "rotate".into(),
                reason: "argument outside the rotation lookup table",
            });
        }
        let k = self.us.partition_point(|&v| v <= u).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let g = |x: f64| -> Result<(f64, f64), EvalError> {
            let j = self.c0.jet(x)?;
            Ok((j.value * self.sin + x * self.cos - u, j.d1 * self.sin + self.cos))
        };
        let g0 = self.us[k] - u;
        if g0 == 0.0 {
            return Ok(x0);
        }
        if self.us[k + 1] == u {
            return Ok(x1);
        }
        refine_root(g, x0, x1, g0, 1e-12)
    }

    /// Jet of the rotated function at `u`.
    pub fn jet(&self, u: f64) -> Result<Jet2, EvalError> {
        let x = self.x_of_u(u)?;
        let j = self.c0.jet(x)?;
        let du = j.d1 * self.sin + self.cos;
        Ok(Jet2::new(
            j.value * self.cos - x * self.sin,
            (j.d1 * self.cos - self.sin) / du,
            j.d2 / (du * du * du),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_rotation() -> RotatedGraph {
        RotatedGraph::new(
            TsFunction::from_expr_text("sin(x)").unwrap(),
            0.5,
            (1.0, 1.5),
            Window::symmetric(64.0),
        )
        .unwrap()
    }

    #[test]
    fn inversion_is_consistent() {
        let g = sine_rotation();
        for k in 0..200 {
            let x = -50.0 + 0.5 * k as f64;
            let u = g.u_of_x(x).unwrap();
            assert!((g.x_of_u(u).unwrap() - x).abs() < 1e-11);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = sine_rotation();
        let h = 1e-5;
        for k in 0..40 {
            let u = -20.0 + 1.01 * k as f64;
            let j = g.jet(u).unwrap();
            let fp = g.jet(u + h).unwrap();
            let fm = g.jet(u - h).unwrap();
            assert!((j.d1 - (fp.value - fm.value) / (2.0 * h)).abs() < 1e-6);
            assert!((j.d2 - (fp.d1 - fm.d1) / (2.0 * h)).abs() < 1e-5);
        }
    }

    #[test]
    fn sine_bounds_fail_for_unit_and_three_halves() {
        // cos reaches -1 < -2/3.
        assert!(!sine_rotation().bounds_check().holds);
    }

    #[test]
    fn vertical_tangent_is_rejected() {
        let err = RotatedGraph::new(
            TsFunction::from_expr_text("sin(x)").unwrap(),
            1.0,
            (1.0, 1.5),
            Window::symmetric(16.0),
        )
        .unwrap_err();
        assert!(matches!(err, ConstructionError::NotMonotone { .. }));
    }

    #[test]
    fn outside_table_is_a_domain_error() {
        let g = sine_rotation();
        assert!(g.jet(1e4).is_err());
    }

    #[test]
    fn line_rotates_to_line() {
        let g = RotatedGraph::new(
            TsFunction::from_expr_text("0").unwrap(),
            0.5,
            (0.6, 2.0),
            Window::symmetric(32.0),
        )
        .unwrap();
        for k in 0..20 {
            let u = -10.0 + k as f64;
            let j = g.jet(u).unwrap();
            assert!((j.value + 0.5 * u).abs() < 1e-11);
            assert!((j.d1 + 0.5).abs() < 1e-12);
            assert_eq!(j.d2, 0.0);
        }
        assert!(g.bounds_check().holds);
    }
}
