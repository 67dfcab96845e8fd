//! Critical sets of a function of one variable on a finite window.
//!
//! The critical set is modelled as a disjoint union of points and closed
//! intervals. Points come from sign changes of `c'` on a sampling lattice
//! (refined by bisection) and from tangential zeros of `c'` located through
//! sign changes of `c''`; intervals come from runs where `c'` vanishes.

use crate::expr::{EvalError, Jet2};
use crate::roots::{bisect, refine_root};
use crate::strip::TsFunction;
use crate::{Tolerances, Window};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriticalError {
    #[error("evaluation failed at s = {at}: {source}")]
    Eval { at: f64, source: EvalError },
    /// More candidates than allowed, or oscillation finer than the lattice
    /// (`count == usize::MAX`).
    #[error("possible accumulation of critical points near s = {near}")]
    Accumulation { near: f64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Locus {
    Point(f64),
    Interval([f64; 2]),
}

impl Locus {
    pub fn left(&self) -> f64 {
        match *self {
            Locus::Point(p) => p,
            Locus::Interval([a, _]) => a,
        }
    }

    pub fn right(&self) -> f64 {
        match *self {
            Locus::Point(p) => p,
            Locus::Interval([_, b]) => b,
        }
    }

    pub fn centre(&self) -> f64 {
        0.5 * (self.left() + self.right())
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Locus::Point(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    LocalMin,
    LocalMax,
    NonExtremum,
    IntervalFlat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalItem {
    pub locus: Locus,
    /// The common value of the function on the locus.
    pub value: f64,
    pub kind: CriticalKind,
    pub nondegenerate: bool,
    /// `c''` at a point locus (0 on intervals).
    #[serde(skip)]
    pub second_derivative: f64,
    /// Signs of `c'` just left and right of the locus (0 when outside the
    /// window).
    #[serde(skip)]
    pub flanks: (i8, i8),
}

/// `true` iff the item is a local extremum. Flat intervals count when
/// the derivative changes sign across them.
pub fn is_extremum(item: &CriticalItem) -> bool {
    match item.kind {
        CriticalKind::LocalMin | CriticalKind::LocalMax => true,
        CriticalKind::NonExtremum => false,
        CriticalKind::IntervalFlat => {
            let (l, r) = item.flanks;
            l != 0 && r != 0 && l != r
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSet {
    pub items: Vec<CriticalItem>,
    pub window: Window,
    /// Smallest value difference between locus-adjacent items; `None` with
    /// fewer than two items.
    pub gap: Option<f64>,
    /// Some item touches the window edge and may continue outside it.
    pub truncated: bool,
}

impl CriticalSet {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.items.iter().map(|i| i.value)
    }

    pub fn point_loci(&self) -> impl Iterator<Item = f64> + '_ {
        self.items.iter().filter_map(|i| match i.locus {
            Locus::Point(p) => Some(p),
            Locus::Interval(_) => None,
        })
    }

    /// Breakpoints splitting the window into pieces on which the function
    /// is monotone: all item loci (both ends of intervals), sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = Vec::with_capacity(self.items.len() * 2);
        for it in &self.items {
            match it.locus {
                Locus::Point(p) => pts.push(p),
                Locus::Interval([a, b]) => {
                    pts.push(a);
                    pts.push(b);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts
    }
}

const UNRESOLVED_RATIO: f64 = 0.75;
/// Radius (relative to `1 + |p|`) over which the scale of `c''` is taken.
const HESS_RADIUS: f64 = 1e-3;

/// Zeros of a scalar function `g` with derivative, as found by
/// [`scan_zeros`].
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Zeros {
    pub points: Vec<f64>,
    pub flats: Vec<(f64, f64)>,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Scans `g` (returning `(g, g')`) on the window lattice for zeros.
pub(crate) fn scan_zeros(
    g: &dyn Fn(f64) -> Result<(f64, f64), EvalError>,
    window: Window,
    tol: &Tolerances,
) -> Result<Zeros, CriticalError> {
    let eval = |s: f64| g(s).map_err(|source| CriticalError::Eval { at: s, source });

    let coarse = window.lattice(tol.lattice.max(2));
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(coarse.len());
    for &s in &coarse {
        let (v, dv) = eval(s)?;
        samples.push((s, v, dv));
    }

    // Refine cells where g is small but not identically zero.
    let refine_below = 10.0 * tol.flat;
    let mut refined = Vec::with_capacity(samples.len());
    for w in samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        refined.push(a);
        let small = a.1.abs().min(b.1.abs()) < refine_below;
        let both_zero = a.1 == 0.0 && b.1 == 0.0;
        if small && !both_zero {
            const SUB: usize = 8;
            for k in 1..SUB {
                let s = a.0 + (b.0 - a.0) * k as f64 / SUB as f64;
                let (v, dv) = eval(s)?;
                refined.push((s, v, dv));
            }
        }
    }
    refined.push(*samples.last().unwrap());
    let samples = refined;
    let n = samples.len();

    // A cell whose endpoint derivatives do not explain the change of g
    // hides oscillation finer than the lattice.
    for w in samples.windows(2) {
        let ((s0, g0, d0), (s1, g1, d1)) = (w[0], w[1]);
        let h = s1 - s0;
        let mismatch = (g1 - g0 - 0.5 * h * (d0 + d1)).abs();
        let scale = g0.abs() + g1.abs() + h * (d0.abs() + d1.abs());
        if g0.abs().max(g1.abs()) > tol.flat && mismatch > UNRESOLVED_RATIO * scale {
            return Err(CriticalError::Accumulation {
                near: s0,
                count: usize::MAX,
            });
        }
    }

    // Flat samples: exact zeros, or tiny values whose sign flips against
    // both neighbours (noise around zero rather than a monotone tail).
    let flat_point: Vec<bool> = (0..n)
        .map(|i| {
            let v = samples[i].1;
            if v == 0.0 {
                return true;
            }
            if v.abs() > tol.flat {
                return false;
            }
            let s = sign(v);
            let left = i.checked_sub(1).map(|j| sign(samples[j].1));
            let right = samples.get(i + 1).map(|x| sign(x.1));
            let differs = |o: Option<i8>| o.is_none_or(|o| o != s);
            differs(left) && differs(right)
        })
        .collect();
    let mut in_flat = vec![false; n];
    let mut flats = Vec::new();
    let mut i = 0;
    while i < n {
        if !flat_point[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && flat_point[i] {
            i += 1;
        }
        let end = i - 1;
        if end - start + 1 >= 3 && samples[end].0 - samples[start].0 >= tol.flat_len {
            flats.push((samples[start].0, samples[end].0));
            in_flat[start..=end].iter_mut().for_each(|f| *f = true);
        }
    }

    let mut points: Vec<f64> = Vec::new();
    for i in 0..n {
        if in_flat[i] {
            continue;
        }
        let (s, v, _) = samples[i];
        if v == 0.0 {
            points.push(s);
            continue;
        }
        if i + 1 == n || in_flat[i + 1] {
            continue;
        }
        let (s1, v1, _) = samples[i + 1];
        if v1 != 0.0 && sign(v) != sign(v1) {
            points.push(refine_root(eval, s, s1, v, tol.root)?);
        }
    }

    // Tangential zeros: g'' changes sign where g keeps its sign, and g is
    // negligible at the extremum of g (absolutely and relative to the cell).
    for i in 0..n - 1 {
        if in_flat[i] || in_flat[i + 1] {
            continue;
        }
        let (s0, v0, d0) = samples[i];
        let (s1, v1, d1) = samples[i + 1];
        if v0 == 0.0 || v1 == 0.0 || sign(v0) != sign(v1) || d0 == 0.0 || d1 == 0.0 {
            continue;
        }
        if sign(d0) == sign(d1) {
            continue;
        }
        let (a, b) = bisect(|s| eval(s).map(|x| x.1), s0, s1, d0, tol.root)?;
        let z = 0.5 * (a + b);
        let gz = eval(z)?.0;
        if gz.abs() <= tol.flat && gz.abs() <= 1e-6 * v0.abs().max(v1.abs()) {
            points.push(z);
        }
    }

    points.sort_by(f64::total_cmp);
    let mut deduped: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        match deduped.last() {
            Some(&q) if (p - q).abs() <= 1e-9 * (1.0 + p.abs()) => {}
            _ => deduped.push(p),
        }
    }
    let total = deduped.len() + flats.len();
    if total > tol.max_items {
        return Err(CriticalError::Accumulation {
            near: window.mid(),
            count: total,
        });
    }
    Ok(Zeros { points: deduped, flats })
}

/// Critical set of an arbitrary jet-valued function on a window.
pub fn find_critical_set_with(
    jet: &dyn Fn(f64) -> Result<Jet2, EvalError>,
    window: Window,
    tol: &Tolerances,
) -> Result<CriticalSet, CriticalError> {
    let g = |s: f64| jet(s).map(|j| (j.d1, j.d2));
    let zeros = scan_zeros(&g, window, tol)?;
    let at = |s: f64| jet(s).map_err(|source| CriticalError::Eval { at: s, source });
    let flank = |s: f64| -> Result<i8, CriticalError> {
        if window.contains(s) {
            Ok(sign(at(s)?.d1))
        } else {
            Ok(0)
        }
    };

    // Loci in order, to bound the side offset by the distance to neighbours.
    let mut loci: Vec<Locus> = zeros.points.iter().map(|&p| Locus::Point(p)).collect();
    loci.extend(zeros.flats.iter().map(|&(a, b)| Locus::Interval([a, b])));
    loci.sort_by(|x, y| x.left().total_cmp(&y.left()));

    let mut items = Vec::with_capacity(loci.len());
    for (k, locus) in loci.iter().enumerate() {
        let prev = k.checked_sub(1).map(|j| loci[j].right());
        let next = loci.get(k + 1).map(Locus::left);
        let room = |d: Option<f64>| d.map_or(f64::INFINITY, |d| 0.25 * d.abs());
        let side = tol
            .side
            .min(room(prev.map(|p| locus.left() - p)))
            .min(room(next.map(|q| q - locus.right())));
        let item = match *locus {
            Locus::Point(p) => {
                let j = at(p)?;
                let flanks = (flank(p - side)?, flank(p + side)?);
                let kind = match flanks {
                    (-1, 1) => CriticalKind::LocalMin,
                    (1, -1) => CriticalKind::LocalMax,
                    (l, r) if l == r && l != 0 => CriticalKind::NonExtremum,
                    // Edge of the window or an unresolved sign: fall back
                    // on curvature.
                    _ if j.d2 > tol.hess => CriticalKind::LocalMin,
                    _ if j.d2 < -tol.hess => CriticalKind::LocalMax,
                    _ => CriticalKind::NonExtremum,
                };
                CriticalItem {
                    locus: *locus,
                    value: j.value,
                    kind,
                    nondegenerate: nondegenerate(jet, p, j.d2, tol.hess),
                    second_derivative: j.d2,
                    flanks,
                }
            }
            Locus::Interval([a, b]) => CriticalItem {
                locus: *locus,
                value: at(0.5 * (a + b))?.value,
                kind: CriticalKind::IntervalFlat,
                nondegenerate: false,
                second_derivative: 0.0,
                flanks: (flank(a - side)?, flank(b + side)?),
            },
        };
        items.push(item);
    }

    let gap = items
        .windows(2)
        .map(|w| (w[0].value - w[1].value).abs())
        .min_by(f64::total_cmp);
    let truncated = items
        .iter()
        .any(|it| it.locus.left() <= window.lo || it.locus.right() >= window.hi);
    Ok(CriticalSet {
        items,
        window,
        gap,
        truncated,
    })
}

/// `|c''(p)|` against the size of `c''` nearby, so that critical points of
/// exponentially small functions are judged on their own scale.
fn nondegenerate(jet: &dyn Fn(f64) -> Result<Jet2, EvalError>, p: f64, d2: f64, hess: f64) -> bool {
    d2 != 0.0 && d2.abs() > hess * hess_scale(jet, p, d2)
}

/// `min(1, max |c''|)` over `p ± HESS_RADIUS (1 + |p|)` and `d2 = c''(p)`.
pub(crate) fn hess_scale(jet: &dyn Fn(f64) -> Result<Jet2, EvalError>, p: f64, d2: f64) -> f64 {
    let r = HESS_RADIUS * (1.0 + p.abs());
    [p - r, p + r]
        .iter()
        .filter_map(|&s| jet(s).ok())
        .map(|j| j.d2.abs())
        .fold(d2.abs(), f64::max)
        .min(1.0)
}

/// Detects and classifies the critical set of `f` on `window`.
pub fn find_critical_set(f: &TsFunction, window: Window, tol: &Tolerances) -> Result<CriticalSet, CriticalError> {
    find_critical_set_with(&|s| f.jet(s), window, tol)
}

/// Points where `f'` equals `level` on the window (sign changes and
/// tangential touches of `f' - level`).
pub fn derivative_level_set(
    f: &TsFunction,
    level: f64,
    window: Window,
    tol: &Tolerances,
) -> Result<Vec<f64>, CriticalError> {
    let g = |s: f64| f.jet(s).map(|j| (j.d1 - level, j.d2));
    Ok(scan_zeros(&g, window, tol)?.points)
}
