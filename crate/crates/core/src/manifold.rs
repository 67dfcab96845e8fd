//! The hypersurface `F = (x1 - c1(x2))(c2(x2) - x1) - |y|^2 = 0` in
//! `R^{m+1}` and its height function `x1`.
//!
//! Points are `[x1, x2, y_1, .., y_{m-1}]`.

use crate::critical::Locus;
use crate::expr::{EvalError, Jet2};
use crate::strip::{RegionError, StripRegion};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ManifoldError {
    #[error("dimension m must be at least 2 (got {0})")]
    Dimension(usize),
    #[error("point has {got} coordinates, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("evaluation failed at x2 = {at}: {source}")]
    Eval { at: f64, source: EvalError },
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("point is off the zero set: F = {value}")]
    OffZeroSet { value: f64 },
    #[error("implicit solve for x1 failed: |dF/dx1| = {d1}")]
    ImplicitSolve { d1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldTolerances {
    /// Allowed `|F|` on the zero set.
    pub zero: f64,
    /// `|y|^2` at or below this marks a boundary point.
    pub boundary: f64,
    /// Critical residual threshold.
    pub residual: f64,
    /// Smallest `|dF/dx1|` accepted by the implicit solve.
    pub implicit: f64,
    /// Smallest `|eigenvalue|` of a nondegenerate Hessian.
    pub hess: f64,
}

impl Default for ManifoldTolerances {
    fn default() -> Self {
        ManifoldTolerances {
            zero: 1e-10,
            boundary: 1e-12,
            residual: 1e-8,
            implicit: 1e-9,
            hess: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ManifoldSpec {
    pub m: usize,
    pub region: StripRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSample {
    pub point: Vec<f64>,
    pub on_boundary: bool,
}

struct Local {
    c1: Jet2,
    c2: Jet2,
}

impl ManifoldSpec {
    pub fn new(m: usize, region: StripRegion) -> Result<ManifoldSpec, ManifoldError> {
        if m < 2 {
            return Err(ManifoldError::Dimension(m));
        }
        Ok(ManifoldSpec { m, region })
    }

    /// Number of coordinates, `m + 1`.
    pub fn dim(&self) -> usize {
        self.m + 1
    }

    fn local(&self, x2: f64) -> Result<Local, ManifoldError> {
        let e = |source| ManifoldError::Eval { at: x2, source };
        Ok(Local {
            c1: self.region.c1.jet(x2).map_err(e)?,
            c2: self.region.c2.jet(x2).map_err(e)?,
        })
    }

    fn check(&self, p: &[f64]) -> Result<(), ManifoldError> {
        if p.len() != self.dim() {
            return Err(ManifoldError::Arity {
                got: p.len(),
                expected: self.dim(),
            });
        }
        Ok(())
    }

    pub fn f(&self, p: &[f64]) -> Result<f64, ManifoldError> {
        self.check(p)?;
        let l = self.local(p[1])?;
        let y2: f64 = p[2..].iter().map(|y| y * y).sum();
        Ok((p[0] - l.c1.value) * (l.c2.value - p[0]) - y2)
    }

    pub fn gradient(&self, p: &[f64]) -> Result<Vec<f64>, ManifoldError> {
        self.check(p)?;
        let l = self.local(p[1])?;
        let (a, b) = (p[0] - l.c1.value, l.c2.value - p[0]);
        let mut g = Vec::with_capacity(self.dim());
        g.push(l.c1.value + l.c2.value - 2.0 * p[0]);
        g.push(-l.c1.d1 * b + l.c2.d1 * a);
        g.extend(p[2..].iter().map(|y| -2.0 * y));
        Ok(g)
    }

    pub fn hessian(&self, p: &[f64]) -> Result<DMatrix<f64>, ManifoldError> {
        self.check(p)?;
        let l = self.local(p[1])?;
        let (a, b) = (p[0] - l.c1.value, l.c2.value - p[0]);
        let n = self.dim();
        let mut h = DMatrix::zeros(n, n);
        h[(0, 0)] = -2.0;
        h[(0, 1)] = l.c1.d1 + l.c2.d1;
        h[(1, 0)] = h[(0, 1)];
        h[(1, 1)] = -l.c1.d2 * b + l.c2.d2 * a - 2.0 * l.c1.d1 * l.c2.d1;
        for j in 2..n {
            h[(j, j)] = -2.0;
        }
        Ok(h)
    }

    /// Solves `F(x1, z) = 0` for `x1` near `guess` by Newton's method, where
    /// `z = (x2, y)`.
    pub fn implicit_height(&self, z: &[f64], guess: f64) -> Result<f64, ManifoldError> {
        let mut p = Vec::with_capacity(self.dim());
        p.push(guess);
        p.extend_from_slice(z);
        for _ in 0..60 {
            let f = self.f(&p)?;
            let d1 = self.gradient(&p)?[0];
            if d1.abs() <= f64::EPSILON {
                return Err(ManifoldError::ImplicitSolve { d1 });
            }
            let step = f / d1;
            p[0] -= step;
            if step.abs() <= 1e-15 * (1.0 + p[0].abs()) {
                break;
            }
        }
        Ok(p[0])
    }
}

/// `n` points with `x2` uniform on the window and `x1` uniform on
/// `[c1(x2), c2(x2)]`, `y` uniform on the sphere of radius
/// `sqrt((x1 - c1)(c2 - x1))`, followed by `n / 10` boundary points.
pub fn sample_zero_set(spec: &ManifoldSpec, n: usize, seed: u64) -> Result<Vec<ZeroSample>, ManifoldError> {
    let w = spec.region.window;
    let tol = ManifoldTolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n + n / 10);
    for _ in 0..n {
        let x2 = rng.random_range(w.lo..=w.hi);
        let l = spec.local(x2)?;
        let x1 = l.c1.value + rng.random::<f64>() * (l.c2.value - l.c1.value);
        let rho = ((x1 - l.c1.value) * (l.c2.value - x1)).max(0.0).sqrt();
        let mut dir: Vec<f64> = (1..spec.m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            dir[0] = 1.0;
        } else {
            dir.iter_mut().for_each(|v| *v /= norm);
        }
        let mut point = vec![x1, x2];
        point.extend(dir.iter().map(|v| v * rho));
        out.push(ZeroSample {
            on_boundary: rho * rho <= tol.boundary,
            point,
        });
    }
    for _ in 0..n / 10 {
        let x2 = rng.random_range(w.lo..=w.hi);
        let l = spec.local(x2)?;
        let x1 = if rng.random::<bool>() { l.c2.value } else { l.c1.value };
        let mut point = vec![x1, x2];
        point.resize(spec.dim(), 0.0);
        out.push(ZeroSample {
            point,
            on_boundary: true,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub samples: usize,
    pub boundary_samples: usize,
    pub max_abs_f: f64,
    pub min_gradient_norm: f64,
    /// Smallest `|dF/dx1|` over boundary samples.
    pub min_boundary_dx1: f64,
    pub separation_certificate: f64,
    pub holds: bool,
}

pub fn verify_regularity(
    spec: &ManifoldSpec,
    samples: &[ZeroSample],
    tol: &ManifoldTolerances,
) -> Result<RegularityReport, ManifoldError> {
    let mut max_abs_f = 0f64;
    let mut min_grad = f64::INFINITY;
    let mut min_dx1 = f64::INFINITY;
    let mut boundary = 0;
    for s in samples {
        max_abs_f = max_abs_f.max(spec.f(&s.point)?.abs());
        let g = spec.gradient(&s.point)?;
        min_grad = min_grad.min(g.iter().map(|v| v * v).sum::<f64>().sqrt());
        if s.on_boundary {
            boundary += 1;
            min_dx1 = min_dx1.min(g[0].abs());
        }
    }
    let cert = spec.region.separation_certificate;
    let scale = 1.0 + cert.abs();
    Ok(RegularityReport {
        samples: samples.len(),
        boundary_samples: boundary,
        max_abs_f,
        min_gradient_norm: min_grad,
        min_boundary_dx1: min_dx1,
        separation_certificate: cert,
        holds: min_grad > 0.0 && min_dx1 >= cert - 1e-9 * scale && max_abs_f <= tol.zero,
    })
}

/// `|(dF/dx2, dF/dy)|`, zero exactly where the height `x1` restricted to
/// the zero set is critical.
pub fn critical_residual(spec: &ManifoldSpec, p: &[f64], tol: &ManifoldTolerances) -> Result<f64, ManifoldError> {
    let f = spec.f(p)?;
    if f.abs() > tol.zero * (1.0 + p[0].abs()).powi(2) {
        return Err(ManifoldError::OffZeroSet { value: f });
    }
    let g = spec.gradient(p)?;
    Ok(g[1..].iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// The points `(c_i(x), x, 0)` over the point critical items of `c1` and
/// `c2`, with the index `i`.
pub fn critical_points(spec: &ManifoldSpec) -> Result<Vec<(u8, Vec<f64>)>, ManifoldError> {
    let (cs1, cs2) = spec.region.critical_sets()?;
    let mut out = Vec::new();
    for (which, cs) in [(1u8, cs1), (2u8, cs2)] {
        for it in &cs.items {
            if let Locus::Point(x) = it.locus {
                let mut p = vec![it.value, x];
                p.resize(spec.dim(), 0.0);
                out.push((which, p));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    /// Eigenvalues of the Hessian of `x1 = phi(x2, y)`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Number of negative eigenvalues.
    pub index: usize,
    pub min_abs_eigenvalue: f64,
    pub nondegenerate: bool,
}

/// Hessian of the local graph `x1 = phi(x2, y)` of the zero set, by second
/// order implicit differentiation.
pub fn implicit_hessian(
    spec: &ManifoldSpec,
    p: &[f64],
    tol: &ManifoldTolerances,
) -> Result<DMatrix<f64>, ManifoldError> {
    let g = spec.gradient(p)?;
    let h = spec.hessian(p)?;
    let f1 = g[0];
    if f1.abs() <= tol.implicit {
        return Err(ManifoldError::ImplicitSolve { d1: f1 });
    }
    let n = spec.m;
    let phi: Vec<f64> = (0..n).map(|i| -g[i + 1] / f1).collect();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (i + 1, j + 1);
            out[(i, j)] = -(h[(a, b)] + h[(0, a)] * phi[j] + h[(0, b)] * phi[i] + h[(0, 0)] * phi[i] * phi[j]) / f1;
        }
    }
    Ok(out)
}

pub fn restricted_hessian(
    spec: &ManifoldSpec,
    p: &[f64],
    tol: &ManifoldTolerances,
) -> Result<HessianReport, ManifoldError> {
    let hphi = implicit_hessian(spec, p, tol)?;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(hphi).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let min_abs = eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    // On a boundary curve the threshold follows the local scale of c_i''.
    let mut scale = 1.0;
    if p[2..].iter().all(|&y| y == 0.0) {
        for f in [&spec.region.c1, &spec.region.c2] {
            let j = f.jet(p[1]).map_err(|source| ManifoldError::Eval { at: p[1], source })?;
            if (p[0] - j.value).abs() <= tol.boundary * (1.0 + j.value.abs()) {
                scale = crate::critical::hess_scale(&|s| f.jet(s), p[1], j.d2);
            }
        }
    }
    Ok(HessianReport {
        index: eigenvalues.iter().filter(|&&v| v < 0.0).count(),
        min_abs_eigenvalue: min_abs,
        nondegenerate: min_abs != 0.0 && min_abs > tol.hess * scale,
        eigenvalues,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSweep {
    pub critical_points: usize,
    pub max_critical_residual: f64,
    pub other_samples: usize,
    pub min_other_residual: f64,
    /// Non-critical samples with residual at or below the threshold.
    pub false_critical: usize,
    pub holds: bool,
}

/// Residual below `tol.residual` at the enumerated critical points and
/// above it at the given samples.
pub fn critical_sweep(
    spec: &ManifoldSpec,
    others: &[ZeroSample],
    tol: &ManifoldTolerances,
) -> Result<CriticalSweep, ManifoldError> {
    let crit = critical_points(spec)?;
    let mut max_c = 0f64;
    for (_, p) in &crit {
        max_c = max_c.max(critical_residual(spec, p, tol)?);
    }
    let mut min_o = f64::INFINITY;
    let mut false_critical = 0;
    for s in others {
        let r = critical_residual(spec, &s.point, tol)?;
        min_o = min_o.min(r);
        if r <= tol.residual {
            false_critical += 1;
        }
    }
    Ok(CriticalSweep {
        critical_points: crit.len(),
        max_critical_residual: max_c,
        other_samples: others.len(),
        min_other_residual: min_o,
        false_critical,
        holds: max_c < tol.residual && false_critical == 0,
    })
}

/// Largest deviation of a sample from the sphere
/// `(x1 - (c1 + c2)/2)^2 + |y|^2 = ((c2 - c1)/2)^2` over its `x2`.
pub fn slice_sphere_defect(spec: &ManifoldSpec, samples: &[ZeroSample]) -> Result<f64, ManifoldError> {
    let mut worst = 0f64;
    for s in samples {
        let p = &s.point;
        let l = spec.local(p[1])?;
        let mid = 0.5 * (l.c1.value + l.c2.value);
        let r = 0.5 * (l.c2.value - l.c1.value);
        let y2: f64 = p[2..].iter().map(|y| y * y).sum();
        let d = ((p[0] - mid).powi(2) + y2 - r * r).abs() / (1.0 + r * r);
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Serialize)]
struct SampleLine<'a> {
    p: &'a [f64],
    #[serde(rename = "F")]
    f: f64,
    #[serde(rename = "gradF")]
    grad: Vec<f64>,
    boundary: bool,
}

/// One JSON object per line: `{"p", "F", "gradF", "boundary"}`.
pub fn sample_lines(spec: &ManifoldSpec, samples: &[ZeroSample]) -> Result<String, ManifoldError> {
    let mut out = String::new();
    for s in samples {
        let line = SampleLine {
            p: &s.point,
            f: spec.f(&s.point)?,
            grad: spec.gradient(&s.point)?,
            boundary: s.on_boundary,
        };
        out.push_str(&serde_json::to_string(&line).expect("sample serializes"));
        out.push('\n');
    }
    Ok(out)
}
