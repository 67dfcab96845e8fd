//! Morse and stability verdicts for the height function on a strip.
//!
//! Properness conditions are global and cannot be decided on a window, so
//! verdicts that depend on them are reported as `window_limited_holds` at
//! best.

use crate::critical::{find_critical_set, CriticalError, CriticalItem, CriticalSet, Locus};
use crate::strip::{slice, RegionError, StripRegion, TsFunction};
use crate::{Tolerances, Window};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    WindowLimitedHolds,
    Undetermined,
}

impl Verdict {
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::Holds | Verdict::WindowLimitedHolds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityTolerances {
    /// Relative separation required between distinct critical values.
    pub inject: f64,
    pub cluster_radius: f64,
    pub cluster_min: usize,
    /// Asymptotic bands narrower than this have no interior.
    pub band_width: f64,
    /// Margin used when testing whether a value lies inside a band.
    pub band_eps: f64,
    /// Half-width of the neighbourhood compared in the stable surrogate.
    pub level_step: f64,
    /// Probe exponents for the asymptotic bands (`s = ±2^k`).
    pub probes: (i32, i32),
}

impl Default for StabilityTolerances {
    fn default() -> Self {
        StabilityTolerances {
            inject: 1e-8,
            cluster_radius: 1e-3,
            cluster_min: 5,
            band_width: 1e-6,
            band_eps: 1e-12,
            level_step: 1e-3,
            probes: (3, 12),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Limit(f64),
    PlusInf,
    MinusInf,
    /// No limit detected; range of the last probes.
    Bounded {
        lo: f64,
        hi: f64,
    },
    Unknown,
}

/// Heights `[lo, hi]` filled by the strip as `s` tends to one end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBand {
    pub side: i8,
    pub c1: Tail,
    pub c2: Tail,
    pub lo: f64,
    pub hi: f64,
}

impl AsymptoticBand {
    fn interior_contains(&self, v: f64, tol: &StabilityTolerances) -> bool {
        self.hi - self.lo > tol.band_width && v > self.lo + tol.band_eps && v < self.hi - tol.band_eps
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccumulationCluster {
    pub centre: f64,
    pub count: usize,
    pub loci_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StabilityEvidence {
    /// Loci of degenerate point items.
    pub degenerate: Vec<f64>,
    /// Flat critical intervals, which are not Morse points.
    pub flat_intervals: Vec<[f64; 2]>,
    /// Pairs of critical values that are not separated.
    pub clashes: Vec<(f64, f64)>,
    pub clusters: Vec<AccumulationCluster>,
    pub bands: Vec<AsymptoticBand>,
    /// Critical values whose preimage escapes through an asymptotic band.
    pub escaping: Vec<f64>,
    /// Critical values where the outer slice counts change with the level.
    pub unstable_levels: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub morse: Verdict,
    pub critical_values_injective: Verdict,
    pub stable_sufficient: Verdict,
    pub strongly_stable: Verdict,
    pub infinitesimally_stable: Verdict,
    pub evidence: StabilityEvidence,
    /// The stable verdict is a surrogate: slice counts outside a compact
    /// sub-window stay constant near each critical value.
    pub stable_is_surrogate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseCheck {
    pub holds: bool,
    pub degenerate: Vec<f64>,
    pub flat_intervals: Vec<[f64; 2]>,
}

/// `true` iff every critical point of `f` on the window has `|f''| > hess`
/// and there are no flat critical intervals.
pub fn morse_check(f: &TsFunction, window: Window, tol: &Tolerances) -> Result<MorseCheck, CriticalError> {
    let cs = find_critical_set(f, window, tol)?;
    Ok(morse_of(&cs))
}

fn morse_of(cs: &CriticalSet) -> MorseCheck {
    let mut degenerate = Vec::new();
    let mut flat_intervals = Vec::new();
    for it in &cs.items {
        match it.locus {
            Locus::Point(p) if !it.nondegenerate => degenerate.push(p),
            Locus::Interval(iv) => flat_intervals.push(iv),
            _ => {}
        }
    }
    MorseCheck {
        holds: degenerate.is_empty() && flat_intervals.is_empty(),
        degenerate,
        flat_intervals,
    }
}

fn tail(f: &TsFunction, side: i8, probes: (i32, i32)) -> Tail {
    let vals: Vec<f64> = (probes.0..=probes.1)
        .map(|k| f.eval(side as f64 * 2f64.powi(k)))
        .take_while(|v| v.as_ref().is_ok_and(|v| v.is_finite()))
        .map(|v| v.unwrap())
        .collect();
    if vals.len() < 3 {
        return Tail::Unknown;
    }
    let n = vals.len();
    let (x0, x1, x2) = (vals[n - 3], vals[n - 2], vals[n - 1]);
    if x2.abs() > 1e3 && x2.abs() > x1.abs() && x1.abs() > x0.abs() && x2.signum() == x1.signum() {
        return if x2 > 0.0 { Tail::PlusInf } else { Tail::MinusInf };
    }
    let (d1, d2) = (x1 - x0, x2 - x1);
    if d2 == 0.0 {
        return Tail::Limit(x2);
    }
    if d1 * d2 > 0.0 && d2.abs() < d1.abs() {
        return Tail::Limit(x2 - d2 * d2 / (d2 - d1));
    }
    let last = &vals[n.saturating_sub(4)..];
    Tail::Bounded {
        lo: last.iter().copied().fold(f64::INFINITY, f64::min),
        hi: last.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn band(region: &StripRegion, side: i8, tol: &StabilityTolerances) -> AsymptoticBand {
    let (t1, t2) = (tail(&region.c1, side, tol.probes), tail(&region.c2, side, tol.probes));
    let lo = match t1 {
        Tail::Limit(l) => l,
        Tail::PlusInf => f64::INFINITY,
        Tail::MinusInf | Tail::Unknown => f64::NEG_INFINITY,
        Tail::Bounded { lo, .. } => lo,
    };
    let hi = match t2 {
        Tail::Limit(l) => l,
        Tail::MinusInf => f64::NEG_INFINITY,
        Tail::PlusInf | Tail::Unknown => f64::INFINITY,
        Tail::Bounded { hi, .. } => hi,
    };
    AsymptoticBand {
        side,
        c1: t1,
        c2: t2,
        lo,
        hi,
    }
}

fn clusters(items: &[&CriticalItem], window: Window, tol: &StabilityTolerances) -> Vec<AccumulationCluster> {
    let mut sorted: Vec<&CriticalItem> = items.to_vec();
    sorted.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut best: Option<AccumulationCluster> = None;
    for centre in sorted.iter().map(|i| i.value) {
        let ball: Vec<&&CriticalItem> = sorted
            .iter()
            .filter(|i| (i.value - centre).abs() <= tol.cluster_radius)
            .collect();
        if ball.len() < tol.cluster_min {
            continue;
        }
        let lo = ball.iter().map(|i| i.locus.left()).fold(f64::INFINITY, f64::min);
        let hi = ball.iter().map(|i| i.locus.right()).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > 0.5 * window.width() && best.as_ref().is_none_or(|b| ball.len() > b.count) {
            best = Some(AccumulationCluster {
                centre,
                count: ball.len(),
                loci_spread: hi - lo,
            });
        }
    }
    best.into_iter().collect()
}

/// Number of slice intervals at height `t`, clipped to `window \ keep`,
/// counting each side of `keep` separately.
fn outer_count(region: &StripRegion, t: f64, keep: (f64, f64)) -> Result<usize, RegionError> {
    let w = region.window;
    let mut n = 0;
    for iv in slice(region, t)?.intervals {
        if iv.a < keep.0 && w.lo < keep.0 {
            n += 1;
        }
        if iv.b > keep.1 && keep.1 < w.hi {
            n += 1;
        }
    }
    Ok(n)
}

fn undetermined(error: String) -> StabilityReport {
    StabilityReport {
        morse: Verdict::Undetermined,
        critical_values_injective: Verdict::Undetermined,
        stable_sufficient: Verdict::Undetermined,
        strongly_stable: Verdict::Undetermined,
        infinitesimally_stable: Verdict::Undetermined,
        evidence: StabilityEvidence {
            error: Some(error),
            ..Default::default()
        },
        stable_is_surrogate: true,
    }
}

/// Classifies the height function of the strip from the critical points
/// of `c1` and `c2` on the region's window.
pub fn classify_stability(region: &StripRegion, tol: &StabilityTolerances) -> StabilityReport {
    match classify(region, tol) {
        Ok(r) => r,
        Err(e) => undetermined(e.to_string()),
    }
}

fn classify(region: &StripRegion, tol: &StabilityTolerances) -> Result<StabilityReport, RegionError> {
    let (cs1, cs2) = region.critical_sets()?;
    let w = region.window;
    let mut ev = StabilityEvidence::default();
    for cs in [cs1, cs2] {
        let m = morse_of(cs);
        ev.degenerate.extend(m.degenerate);
        ev.flat_intervals.extend(m.flat_intervals);
    }
    let morse = if ev.degenerate.is_empty() {
        Verdict::Holds
    } else {
        Verdict::Fails
    };

    let items: Vec<&CriticalItem> = cs1.items.iter().chain(&cs2.items).collect();
    let mut values: Vec<f64> = items.iter().map(|i| i.value).collect();
    values.sort_by(f64::total_cmp);
    for p in values.windows(2) {
        if p[1] - p[0] <= tol.inject * p[0].abs().max(p[1].abs()) {
            ev.clashes.push((p[0], p[1]));
        }
    }
    let injective = if ev.clashes.is_empty() {
        Verdict::Holds
    } else {
        Verdict::Fails
    };

    ev.bands = vec![band(region, -1, tol), band(region, 1, tol)];
    ev.escaping = values
        .iter()
        .copied()
        .filter(|&v| ev.bands.iter().any(|b| b.interior_contains(v, tol)))
        .collect();
    ev.escaping.dedup();

    for it in &items {
        let v = it.value;
        let nearest = values
            .iter()
            .filter(|&&u| u != v)
            .map(|&u| (u - v).abs())
            .fold(f64::INFINITY, f64::min);
        let step = tol.level_step.min(0.25 * nearest);
        let same: Vec<&&CriticalItem> = items.iter().filter(|j| (j.value - v).abs() <= step).collect();
        let margin = 0.125 * w.width();
        let keep = (
            same.iter().map(|j| j.locus.left()).fold(f64::INFINITY, f64::min) - margin,
            same.iter().map(|j| j.locus.right()).fold(f64::NEG_INFINITY, f64::max) + margin,
        );
        let counts = [
            outer_count(region, v - step, keep)?,
            outer_count(region, v, keep)?,
            outer_count(region, v + step, keep)?,
        ];
        if counts[0] != counts[1] || counts[1] != counts[2] {
            ev.unstable_levels.push(v);
        }
    }
    ev.unstable_levels.sort_by(f64::total_cmp);
    ev.unstable_levels.dedup();

    ev.clusters = clusters(&items, w, tol);

    let limited = |ok: bool| {
        if ok {
            Verdict::WindowLimitedHolds
        } else {
            Verdict::Fails
        }
    };
    let injective_ok = injective == Verdict::Holds;
    Ok(StabilityReport {
        morse,
        critical_values_injective: injective,
        stable_sufficient: limited(injective_ok && ev.unstable_levels.is_empty()),
        strongly_stable: limited(injective_ok && ev.escaping.is_empty()),
        infinitesimally_stable: limited(injective_ok && ev.clusters.is_empty()),
        evidence: ev,
        stable_is_surrogate: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strip::make_region;

    fn region(c1: &str, c2: &str, w: Window) -> StripRegion {
        make_region(
            TsFunction::from_expr_text(c1).unwrap(),
            TsFunction::from_expr_text(c2).unwrap(),
            w,
        )
        .unwrap()
    }

    fn morse(text: &str, w: Window) -> bool {
        morse_check(&TsFunction::from_expr_text(text).unwrap(), w, &Tolerances::default())
            .unwrap()
            .holds
    }

    #[test]
    fn morse_examples() {
        assert!(morse("sin(x)", Window::symmetric(7.0)));
        assert!(morse("sin(x)+5", Window::symmetric(7.0)));
        assert!(!morse("x^3", Window::symmetric(2.0)));
        assert!(morse("sqrt(1+2*x^2)", Window::symmetric(5.0)));
    }

    #[test]
    fn gaussian_sine_pair() {
        let w = Window::symmetric(10.0);
        let r = region("exp(-x^2)*sin(x)", "10/(x^2+1)", w);
        let rep = classify_stability(&r, &StabilityTolerances::default());
        assert_eq!(rep.morse, Verdict::Holds);
        assert_eq!(
            rep.critical_values_injective,
            Verdict::Holds,
            "{:?}",
            rep.evidence.clashes
        );
        assert_eq!(
            rep.stable_sufficient,
            Verdict::WindowLimitedHolds,
            "{:?}",
            rep.evidence.unstable_levels
        );
        assert_eq!(rep.strongly_stable, Verdict::WindowLimitedHolds, "{:?}", rep.evidence);
        assert_eq!(rep.infinitesimally_stable, Verdict::Fails);

        let shifted = region("exp(-x^2)*sin(x)", "10/(x^2+1)+0.5", w);
        let rep = classify_stability(&shifted, &StabilityTolerances::default());
        assert_eq!(rep.strongly_stable, Verdict::Fails);
        assert_eq!(rep.stable_sufficient, Verdict::WindowLimitedHolds);
    }

    #[test]
    fn sine_pair_is_not_injective() {
        let r = region("sin(x)", "sin(x)+1", Window::symmetric(7.0));
        let rep = classify_stability(&r, &StabilityTolerances::default());
        assert_eq!(rep.morse, Verdict::Holds);
        assert_eq!(rep.critical_values_injective, Verdict::Fails);
        assert_eq!(rep.stable_sufficient, Verdict::Fails);
        assert_eq!(rep.strongly_stable, Verdict::Fails);
    }

    #[test]
    fn constants_have_no_failures() {
        let r = region("-1", "1", Window::symmetric(3.0));
        let rep = classify_stability(&r, &StabilityTolerances::default());
        for v in [
            rep.morse,
            rep.critical_values_injective,
            rep.stable_sufficient,
            rep.strongly_stable,
            rep.infinitesimally_stable,
        ] {
            assert!(v.is_positive(), "{rep:?}");
        }
    }

    #[test]
    fn tails() {
        let probes = (3, 12);
        let f = |t: &str| TsFunction::from_expr_text(t).unwrap();
        assert!(matches!(tail(&f("1/(x^2+1)"), 1, probes), Tail::Limit(l) if l.abs() < 1e-7));
        assert_eq!(tail(&f("x"), 1, probes), Tail::PlusInf);
        assert_eq!(tail(&f("x"), -1, probes), Tail::MinusInf);
        assert!(matches!(tail(&f("sin(x)"), 1, probes), Tail::Bounded { .. }));
    }
}
