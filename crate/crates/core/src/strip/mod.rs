//! The closed strip between two graphs and the level slices of its height.

mod function;

pub use function::{FunctionSource, TsFunction};

use crate::critical::{find_critical_set, CriticalError, CriticalSet};
use crate::expr::EvalError;
use crate::roots::refine_root;
use crate::{Tolerances, Window};
use serde::Serialize;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("c1 < c2 fails at s = {at}: c2 - c1 = {gap}")]
    Separation { at: f64, gap: f64 },
    #[error("evaluation of c{which} failed at s = {at}: {source}")]
    Eval { which: u8, at: f64, source: EvalError },
    #[error("critical set of c{which}: {source}")]
    Critical { which: u8, source: CriticalError },
}

/// `{(t, s) : c1(s) <= t <= c2(s), s in window}` with `c1 < c2` certified on
/// the window.
#[derive(Debug, Clone)]
pub struct StripRegion {
    pub c1: TsFunction,
    pub c2: TsFunction,
    pub window: Window,
    /// Lower bound for `c2 - c1` over the window (lattice minimum refined at
    /// local minima).
    pub separation_certificate: f64,
    pub tol: Tolerances,
    critical: OnceLock<Result<(CriticalSet, CriticalSet), RegionError>>,
}

pub fn make_region(c1: TsFunction, c2: TsFunction, window: Window) -> Result<StripRegion, RegionError> {
    make_region_with(c1, c2, window, Tolerances::default())
}

pub fn make_region_with(
    c1: TsFunction,
    c2: TsFunction,
    window: Window,
    tol: Tolerances,
) -> Result<StripRegion, RegionError> {
    let gap = |s: f64| -> Result<(f64, f64, f64), RegionError> {
        let a = c1.jet(s).map_err(|source| RegionError::Eval {
            which: 1,
            at: s,
            source,
        })?;
        let b = c2.jet(s).map_err(|source| RegionError::Eval {
            which: 2,
            at: s,
            source,
        })?;
        Ok((b.value - a.value, b.d1 - a.d1, b.d2 - a.d2))
    };
    let lattice = window.lattice(tol.lattice.max(2));
    let mut samples = Vec::with_capacity(lattice.len());
    for &s in &lattice {
        let (d, dd, _) = gap(s)?;
        if d.is_nan() || d <= 0.0 {
            return Err(RegionError::Separation { at: s, gap: d });
        }
        samples.push((s, d, dd));
    }
    let mut cert = samples.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    // Refine at interior lattice minima where the derivative of the gap
    // changes sign.
    for w in samples.windows(3) {
        let (l, m, r) = (w[0], w[1], w[2]);
        if !(m.1 <= l.1 && m.1 <= r.1) {
            continue;
        }
        for (a, b) in [(l, m), (m, r)] {
            if a.2 < 0.0 && b.2 > 0.0 {
                let z = refine_root(|s| gap(s).map(|x| (x.1, x.2)), a.0, b.0, a.2, tol.root)?;
                let (d, _, _) = gap(z)?;
                if d <= 0.0 {
                    return Err(RegionError::Separation { at: z, gap: d });
                }
                cert = cert.min(d);
            }
        }
    }
    Ok(StripRegion {
        c1,
        c2,
        window,
        separation_certificate: cert,
        tol,
        critical: OnceLock::new(),
    })
}

impl StripRegion {
    /// Critical sets of `c1` and `c2` on the window, computed once.
    pub fn critical_sets(&self) -> Result<(&CriticalSet, &CriticalSet), RegionError> {
        let r = self.critical.get_or_init(|| {
            let cs1 = find_critical_set(&self.c1, self.window, &self.tol)
                .map_err(|source| RegionError::Critical { which: 1, source })?;
            let cs2 = find_critical_set(&self.c2, self.window, &self.tol)
                .map_err(|source| RegionError::Critical { which: 2, source })?;
            Ok((cs1, cs2))
        });
        match r {
            Ok((a, b)) => Ok((a, b)),
            Err(e) => Err(e.clone()),
        }
    }

    /// Height range `[min c1, max c2]` over the window.
    pub fn height_range(&self) -> Result<(f64, f64), RegionError> {
        let (cs1, cs2) = self.critical_sets()?;
        let ends = |f: &TsFunction, which| -> Result<[f64; 2], RegionError> {
            let e = |s| f.eval(s).map_err(|source| RegionError::Eval { which, at: s, source });
            Ok([e(self.window.lo)?, e(self.window.hi)?])
        };
        let lo = ends(&self.c1, 1)?
            .into_iter()
            .chain(cs1.values())
            .fold(f64::INFINITY, f64::min);
        let hi = ends(&self.c2, 2)?
            .into_iter()
            .chain(cs2.values())
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((lo, hi))
    }

    /// `true` iff `(t, s)` lies in the closed strip.
    pub fn contains(&self, t: f64, s: f64) -> Result<bool, RegionError> {
        let a = self.c1.eval(s).map_err(|source| RegionError::Eval {
            which: 1,
            at: s,
            source,
        })?;
        let b = self.c2.eval(s).map_err(|source| RegionError::Eval {
            which: 2,
            at: s,
            source,
        })?;
        Ok(a <= t && t <= b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceInterval {
    pub a: f64,
    pub b: f64,
    /// Touches the window edge.
    pub clipped: bool,
    /// A single tangential point `[a, a]` at an exactly critical level.
    pub degenerate: bool,
}

impl SliceInterval {
    pub fn contains(&self, s: f64) -> bool {
        self.a <= s && s <= self.b
    }

    pub fn overlaps(&self, other: &SliceInterval) -> bool {
        self.a <= other.b && other.a <= self.b
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// Components of `{s in window : c1(s) <= t <= c2(s)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSlice {
    pub t: f64,
    pub intervals: Vec<SliceInterval>,
}

impl LevelSlice {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Any interval at this level is a tangential point.
    pub fn is_degenerate(&self) -> bool {
        self.intervals.iter().any(|i| i.degenerate)
    }

    /// Index of the interval containing `s`.
    pub fn locate(&self, s: f64) -> Option<usize> {
        let k = self.intervals.partition_point(|i| i.b < s);
        (k < self.intervals.len() && self.intervals[k].contains(s)).then_some(k)
    }
}

pub fn slice(region: &StripRegion, t: f64) -> Result<LevelSlice, RegionError> {
    Ok(LevelSlice {
        t,
        intervals: slice_between(region, t, t)?,
    })
}

/// Components of `{s in window : c1(s) <= hi, c2(s) >= lo}`. For `lo <= hi`
/// these are the projections of the components of the part of the strip
/// with heights in `[lo, hi]` (every `s`-fibre of that part is an interval).
pub fn slice_between(region: &StripRegion, lo: f64, hi: f64) -> Result<Vec<SliceInterval>, RegionError> {
    let (cs1, cs2) = region.critical_sets()?;
    let w = region.window;
    let tol = &region.tol;
    let mut cuts = vec![w.lo, w.hi];
    level_roots(&region.c1, 1, hi, &cs1.breakpoints(), w, tol, &mut cuts)?;
    level_roots(&region.c2, 2, lo, &cs2.breakpoints(), w, tol, &mut cuts)?;
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let member = |s: f64| -> Result<bool, RegionError> {
        let a = region.c1.eval(s).map_err(|source| RegionError::Eval {
            which: 1,
            at: s,
            source,
        })?;
        let b = region.c2.eval(s).map_err(|source| RegionError::Eval {
            which: 2,
            at: s,
            source,
        })?;
        Ok(a <= hi && b >= lo)
    };

    let mut out: Vec<SliceInterval> = Vec::new();
    let mut open: Option<f64> = None;
    let cells = cuts.len() - 1;
    let mut prev_in = false;
    for k in 0..cells {
        let (a, b) = (cuts[k], cuts[k + 1]);
        let inside = member(0.5 * (a + b))?;
        match (open, inside) {
            (None, true) => open = Some(a),
            (Some(start), false) => {
                out.push(interval(start, a, w, false));
                open = None;
            }
            (None, false) if k > 0 && !prev_in && member(a)? => {
                out.push(interval(a, a, w, true));
            }
            _ => {}
        }
        prev_in = inside;
    }
    if let Some(start) = open {
        out.push(interval(start, w.hi, w, false));
    }
    Ok(out)
}

fn interval(a: f64, b: f64, w: Window, degenerate: bool) -> SliceInterval {
    SliceInterval {
        a,
        b,
        clipped: a <= w.lo || b >= w.hi,
        degenerate,
    }
}

/// Roots of `f(s) = t` on the monotone pieces cut out by `breaks`.
fn level_roots(
    f: &TsFunction,
    which: u8,
    t: f64,
    breaks: &[f64],
    w: Window,
    tol: &Tolerances,
    out: &mut Vec<f64>,
) -> Result<(), RegionError> {
    let g = |s: f64| {
        f.jet(s)
            .map(|j| (j.value - t, j.d1))
            .map_err(|source| RegionError::Eval { which, at: s, source })
    };
    let mut nodes = Vec::with_capacity(breaks.len() + 2);
    nodes.push(w.lo);
    nodes.extend(breaks.iter().copied().filter(|&b| b > w.lo && b < w.hi));
    nodes.push(w.hi);
    nodes.dedup();
    let mut vals = Vec::with_capacity(nodes.len());
    for &s in &nodes {
        vals.push(g(s)?.0);
    }
    for k in 0..nodes.len() {
        if vals[k] == 0.0 {
            out.push(nodes[k]);
        }
        if k + 1 < nodes.len() && vals[k] * vals[k + 1] < 0.0 {
            out.push(refine_root(g, nodes[k], nodes[k + 1], vals[k], tol.root)?);
        }
    }
    Ok(())
}
