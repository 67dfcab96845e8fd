use crate::strip::{RegionError, StripRegion};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CwTolerances {
    /// Minimum spacing of critical values away from the declared points.
    pub discrete: f64,
    /// Radius of the balls removed around declared points.
    pub zf: f64,
    /// A critical value this close to a declared point makes it unclean.
    pub clean: f64,
}

impl Default for CwTolerances {
    fn default() -> Self {
        CwTolerances {
            discrete: 1e-6,
            zf: 1e-3,
            clean: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct CwVerdicts {
    pub discrete_in_window: bool,
    pub closed_away_from_ZF: bool,
    pub ZF_points_clean: bool,
}

impl CwVerdicts {
    pub fn all(&self) -> bool {
        self.discrete_in_window && self.closed_away_from_ZF && self.ZF_points_clean
    }
}

/// A run of critical values with consecutive gaps below `tol.discrete`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CwWarning {
    pub near: f64,
    pub count: usize,
    pub spread: f64,
    /// Whether the cluster sits within `tol.zf` of a declared point.
    pub declared: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct CwReport {
    pub critical_values: Vec<f64>,
    pub min_gap: f64,
    pub declared_Z_F: Vec<f64>,
    pub verdicts: CwVerdicts,
    pub warnings: Vec<CwWarning>,
}

/// Checks that the critical values of `c1` and `c2` form a discrete closed
/// set away from the declared points `z_f`, inside the window.
pub fn check_cw_hypotheses(region: &StripRegion, z_f: &[f64], tol: &CwTolerances) -> Result<CwReport, RegionError> {
    let (cs1, cs2) = region.critical_sets()?;
    let mut values: Vec<f64> = cs1.values().chain(cs2.values()).collect();
    values.sort_by(f64::total_cmp);
    values.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * a.abs().max(b.abs()));

    let near_zf = |v: f64| z_f.iter().any(|&p| (v - p).abs() <= tol.zf);
    let away: Vec<f64> = values.iter().copied().filter(|&v| !near_zf(v)).collect();
    let min_gap = away.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);

    let mut warnings = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k < values.len() && values[k] - values[k - 1] < tol.discrete {
            continue;
        }
        if k - start >= 2 {
            let run = &values[start..k];
            let near = run.iter().sum::<f64>() / run.len() as f64;
            warnings.push(CwWarning {
                near,
                count: run.len(),
                spread: run[run.len() - 1] - run[0],
                declared: near_zf(near),
            });
        }
        start = k;
    }

    let verdicts = CwVerdicts {
        discrete_in_window: min_gap > tol.discrete,
        closed_away_from_ZF: warnings.iter().all(|w| w.declared),
        ZF_points_clean: !values.iter().any(|&v| z_f.iter().any(|&p| (v - p).abs() <= tol.clean)),
    };
    warnings.retain(|w| !w.declared);
    Ok(CwReport {
        critical_values: values,
        min_gap,
        declared_Z_F: z_f.to_vec(),
        verdicts,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strip::{make_region, TsFunction};
    use crate::Window;

    fn region(c1: &str, c2: &str, w: Window) -> StripRegion {
        make_region(
            TsFunction::from_expr_text(c1).unwrap(),
            TsFunction::from_expr_text(c2).unwrap(),
            w,
        )
        .unwrap()
    }

    #[test]
    fn wide_sine_pair_passes() {
        let r = region("sin(x)", "sin(x)+3", Window::symmetric(10.0));
        let rep = check_cw_hypotheses(&r, &[], &CwTolerances::default()).unwrap();
        assert!(rep.verdicts.all());
        assert_eq!(rep.critical_values.len(), 4);
        assert!(rep.warnings.is_empty());
        assert!((rep.min_gap - 1.0).abs() < 1e-9);
    }

    #[test]
    fn accumulation_at_zero() {
        let r = region("exp(-x^2)*sin(x)", "3/(x^2+1)+0.5", Window::symmetric(10.0));
        let declared = check_cw_hypotheses(&r, &[0.0], &CwTolerances::default()).unwrap();
        assert!(declared.verdicts.all(), "{declared:?}");
        assert!(declared.warnings.is_empty());

        let missing = check_cw_hypotheses(&r, &[], &CwTolerances::default()).unwrap();
        assert!(!missing.verdicts.closed_away_from_ZF);
        assert!(!missing.verdicts.discrete_in_window);
        assert_eq!(missing.warnings.len(), 1);
        assert!(missing.warnings[0].near.abs() < 1e-6);
    }

    #[test]
    fn declared_point_hit_by_a_value_is_unclean() {
        let r = region("sin(x)", "sin(x)+3", Window::symmetric(10.0));
        let rep = check_cw_hypotheses(&r, &[1.0], &CwTolerances::default()).unwrap();
        assert!(!rep.verdicts.ZF_points_clean);
    }
}
