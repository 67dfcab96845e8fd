use super::{Catalogue, ConstructionError};
use crate::expr::Jet2;
use crate::strip::TsFunction;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::RangeInclusive;

/// Probe exponents `k` for the points `x = ±2^k`.
pub const DEFAULT_PROBES: RangeInclusive<i32> = 3..=9;

const DIVERGENCE_THRESHOLD: f64 = 1e3;
const LIMIT_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    MinusInf,
    PlusInf,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::MinusInf => -1.0,
            Side::PlusInf => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Limit(f64),
    PlusInf,
    MinusInf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticClaim {
    pub side: Side,
    pub target: Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticVerdict {
    Consistent,
    Inconsistent,
    /// Fewer than two probes could be evaluated.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub claim: AsymptoticClaim,
    /// `(x, f(x))` in order of increasing `|x|`.
    pub probes: Vec<(f64, f64)>,
    pub verdict: AsymptoticVerdict,
    /// Some probes were dropped because evaluation failed.
    pub reduced_confidence: bool,
}

impl AsymptoticReport {
    pub fn consistent(&self) -> bool {
        self.verdict == AsymptoticVerdict::Consistent
    }
}

pub fn verify_asymptotics(f: &TsFunction, claim: AsymptoticClaim) -> AsymptoticReport {
    verify_asymptotics_with(f, claim, DEFAULT_PROBES)
}

/// Checks the claim on the probes `x = ±2^k`, `k` in `ks`. Evaluation stops
/// at the first failing probe.
pub fn verify_asymptotics_with(f: &TsFunction, claim: AsymptoticClaim, ks: RangeInclusive<i32>) -> AsymptoticReport {
    let planned = ks.clone().count();
    let mut probes = Vec::with_capacity(planned);
    for k in ks {
        let x = claim.side.sign() * 2f64.powi(k);
        match f.eval(x) {
            Ok(v) => probes.push((x, v)),
            Err(_) => break,
        }
    }
    let reduced_confidence = probes.len() < planned;
    let verdict = if probes.len() < 2 {
        AsymptoticVerdict::Undetermined
    } else {
        match tail_consistent(&probes, claim.target) {
            (true, true) => AsymptoticVerdict::Consistent,
            // Monotone towards the target but cut short before the threshold.
            (true, false) if reduced_confidence => AsymptoticVerdict::Undetermined,
            _ => AsymptoticVerdict::Inconsistent,
        }
    };
    AsymptoticReport {
        claim,
        probes,
        verdict,
        reduced_confidence,
    }
}

/// `(monotone towards the target, last probe within the threshold)`.
fn tail_consistent(probes: &[(f64, f64)], target: Target) -> (bool, bool) {
    // Deviation from the target, oriented so that "towards the target"
    // means decreasing.
    let dev: Vec<f64> = probes
        .iter()
        .map(|&(_, v)| match target {
            Target::Limit(l) => v - l,
            Target::PlusInf => -v,
            Target::MinusInf => v,
        })
        .collect();
    let last_change = (1..dev.len())
        .rev()
        .find(|&k| (dev[k] < 0.0) != (dev[k - 1] < 0.0))
        .unwrap_or(0);
    let tail = &dev[last_change..];
    let last = *probes.last().map(|(_, v)| v).unwrap();
    match target {
        Target::Limit(l) => (
            tail.windows(2).all(|w| w[1].abs() <= w[0].abs()),
            (last - l).abs() < LIMIT_THRESHOLD,
        ),
        Target::PlusInf => (tail.windows(2).all(|w| w[1] < w[0]), last > DIVERGENCE_THRESHOLD),
        Target::MinusInf => (tail.windows(2).all(|w| w[1] < w[0]), last < -DIVERGENCE_THRESHOLD),
    }
}

/// Which subsequence of analytic extremal loci to report: the side of the
/// real line and the sign of the oscillating factor (`cos = ±1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub side: Side,
    pub cos_sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceWitness {
    pub branch: Branch,
    /// `(x_j, c'(x_j))` with `|x_j|` and `|c'(x_j)|` strictly increasing.
    pub points: Vec<(f64, f64)>,
    /// Stopped before `count` points because evaluation failed.
    pub truncated: bool,
}

/// Points where the oscillating factor of the named catalogue function has
/// `cos(e^{q(x)}) = ±1`, i.e. `q(x) = ln(jπ)` with `j` even or odd.
pub fn divergence_witnesses(
    entry: &Catalogue,
    count: usize,
    branch: Branch,
) -> Result<DivergenceWitness, ConstructionError> {
    // Exponent degree of q(x) = x^n inside e^{q}.
    let n: i32 = match entry {
        Catalogue::P0 { .. } => 2,
        Catalogue::P00 { .. } => 1,
        Catalogue::E1 => 4,
        Catalogue::E2 => 3,
        other => {
            return Err(ConstructionError::Parameter(format!(
                "{} has no divergence witnesses",
                other.name()
            )))
        }
    };
    if n % 2 == 1 && branch.side == Side::MinusInf {
        return Err(ConstructionError::Parameter(format!(
            "{}' does not diverge as x -> -inf (see derivative_tail)",
            entry.name()
        )));
    }
    if branch.cos_sign != 1 && branch.cos_sign != -1 {
        return Err(ConstructionError::Parameter("cos_sign must be 1 or -1".into()));
    }
    let f = super::catalogue(entry)?;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(count);
    let mut truncated = false;
    let mut j: u64 = 1;
    while points.len() < count {
        let m = if branch.cos_sign == 1 { 2 * j } else { 2 * j - 1 };
        j += 1;
        let q = (m as f64 * PI).ln();
        if q <= 0.0 {
            continue;
        }
        let x = branch.side.sign() * q.powf(1.0 / f64::from(n));
        let d = match f.jet(x) {
            Ok(Jet2 { d1, .. }) => d1,
            Err(_) => {
                truncated = true;
                break;
            }
        };
        if points.last().is_none_or(|&(_, prev)| d.abs() > prev.abs()) {
            points.push((x, d));
        }
        if j > 1 << 40 {
            truncated = true;
            break;
        }
    }
    Ok(DivergenceWitness {
        branch,
        points,
        truncated,
    })
}

/// `(x, f'(x))` at `x = ±2^k`, `k` in `ks`, stopping at the first failure.
pub fn derivative_tail(f: &TsFunction, side: Side, ks: RangeInclusive<i32>) -> Vec<(f64, f64)> {
    ks.map(|k| side.sign() * 2f64.powi(k))
        .map_while(|x| f.jet(x).ok().map(|j| (x, j.d1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::catalogue;
    use super::*;

    fn claim(side: Side, target: Target) -> AsymptoticClaim {
        AsymptoticClaim { side, target }
    }

    #[test]
    fn logistic_limits() {
        // (p1 e^x + p2)/(e^x + 1): p2 at -inf, p1 at +inf.
        let f = catalogue(&Catalogue::Logistic { p1: 0.0, p2: 1.0 }).unwrap();
        assert!(verify_asymptotics(&f, claim(Side::MinusInf, Target::Limit(1.0))).consistent());
        assert!(verify_asymptotics(&f, claim(Side::PlusInf, Target::Limit(0.0))).consistent());
        assert!(!verify_asymptotics(&f, claim(Side::MinusInf, Target::Limit(0.0))).consistent());
    }

    #[test]
    fn hyperbola_diverges_both_ways() {
        let f = catalogue(&Catalogue::HyperbolaPlusInf { r: 4.0 }).unwrap();
        for side in [Side::MinusInf, Side::PlusInf] {
            assert!(verify_asymptotics(&f, claim(side, Target::PlusInf)).consistent());
        }
        // Linear growth of slope 1 stays below the threshold at 2^9.
        let f = catalogue(&Catalogue::HyperbolaPlusInf { r: 1.0 }).unwrap();
        let r = verify_asymptotics(&f, claim(Side::PlusInf, Target::PlusInf));
        assert_eq!(r.verdict, AsymptoticVerdict::Inconsistent);
        assert!(verify_asymptotics_with(&f, claim(Side::PlusInf, Target::PlusInf), 3..=10).consistent());
    }

    #[test]
    fn sine_does_not_settle() {
        let f = catalogue(&Catalogue::Sin).unwrap();
        assert!(!verify_asymptotics(&f, claim(Side::PlusInf, Target::Limit(0.0))).consistent());
    }

    #[test]
    fn overflow_reduces_confidence() {
        let f = TsFunction::from_expr_text("exp(x)").unwrap();
        let r = verify_asymptotics_with(&f, claim(Side::PlusInf, Target::PlusInf), 3..=12);
        assert!(r.reduced_confidence);
        assert_eq!(r.probes.len(), 7);
        assert!(r.consistent());
    }

    #[test]
    fn truncated_monotone_tail_is_undetermined() {
        // Grows linearly but overflows before reaching the divergence threshold.
        let f = TsFunction::from_expr_text("x + 1/(1 + exp(-exp(x^2)))").unwrap();
        let r = verify_asymptotics_with(&f, claim(Side::PlusInf, Target::PlusInf), 3..=12);
        assert!(r.reduced_confidence);
        assert_eq!(r.verdict, AsymptoticVerdict::Undetermined);
        let r = verify_asymptotics_with(&f, claim(Side::PlusInf, Target::MinusInf), 3..=12);
        assert_eq!(r.verdict, AsymptoticVerdict::Inconsistent);
    }

    #[test]
    fn witnesses_for_c_p0() {
        let entry = Catalogue::P0 { p: vec![1.0, 0.0, 1.0] };
        for side in [Side::MinusInf, Side::PlusInf] {
            for cos_sign in [1, -1] {
                let w = divergence_witnesses(&entry, 5, Branch { side, cos_sign }).unwrap();
                assert_eq!(w.points.len(), 5);
                let expect = side.sign() * f64::from(cos_sign);
                for pair in w.points.windows(2) {
                    assert!(pair[1].1.abs() > pair[0].1.abs());
                    assert!(pair[1].0.abs() > pair[0].0.abs());
                }
                assert!(w.points.iter().all(|&(_, d)| d * expect > 0.0));
            }
        }
    }

    #[test]
    fn witness_loci_are_analytic() {
        let entry = Catalogue::P0 { p: vec![1.0, 0.0, 1.0] };
        let w = divergence_witnesses(
            &entry,
            3,
            Branch {
                side: Side::PlusInf,
                cos_sign: 1,
            },
        )
        .unwrap();
        let x0 = w.points[0].0;
        assert!(((x0 * x0).exp().cos() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_count_is_empty() {
        let w = divergence_witnesses(
            &Catalogue::E1,
            0,
            Branch {
                side: Side::PlusInf,
                cos_sign: 1,
            },
        )
        .unwrap();
        assert!(w.points.is_empty());
    }

    #[test]
    fn c_p00_left_tail_flattens() {
        let f = catalogue(&Catalogue::P00 { p: vec![1.0, 0.0, 1.0] }).unwrap();
        let tail = derivative_tail(&f, Side::MinusInf, DEFAULT_PROBES);
        assert_eq!(tail.len(), 7);
        assert!(tail.windows(2).all(|w| w[1].1.abs() < w[0].1.abs()));
        assert!(tail.last().unwrap().1.abs() < 1e-6);
        assert!(divergence_witnesses(
            &Catalogue::P00 { p: vec![1.0, 0.0, 1.0] },
            3,
            Branch {
                side: Side::MinusInf,
                cos_sign: 1
            }
        )
        .is_err());
    }
}
