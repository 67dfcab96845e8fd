use super::ReebGraph;
use crate::critical::{CriticalKind, CriticalSet, Locus};
use crate::strip::{slice_between, RegionError, StripRegion};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictError {
    #[error("the shift a must be positive (got {0})")]
    NonPositive(f64),
    #[error("hypothesis violated: a = {a} is not below the critical value gap {gap}")]
    HypothesisViolation { a: f64, gap: f64 },
    #[error("critical item {index} is a flat interval reaching the window edge")]
    NotCompact { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedVertex {
    pub height: f64,
    pub degree: usize,
    /// Index of the critical item of `c1`.
    pub item: usize,
    /// 1 for the vertex of `c1` at `v`, 2 for the copy of `c2` at `v + a`.
    pub copy: u8,
    /// Locus of the item, used to locate the contour.
    pub locus: Locus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedVertices {
    pub a: f64,
    pub vertices: Vec<PredictedVertex>,
}

/// Vertex degrees for the pair `(c1, c1 + a)` from the critical items of `c1`.
pub fn predict_mthm2(cs1: &CriticalSet, a: f64) -> Result<PredictedVertices, PredictError> {
    if a.is_nan() || a <= 0.0 {
        return Err(PredictError::NonPositive(a));
    }
    if let Some(gap) = cs1.gap {
        if a >= gap {
            return Err(PredictError::HypothesisViolation { a, gap });
        }
    }
    let mut vertices = Vec::with_capacity(2 * cs1.len());
    for (index, it) in cs1.items.iter().enumerate() {
        let (lower, upper) = match it.kind {
            CriticalKind::LocalMin => (1, 3),
            CriticalKind::LocalMax => (3, 1),
            CriticalKind::NonExtremum => (2, 2),
            CriticalKind::IntervalFlat => match it.flanks {
                (0, _) | (_, 0) => return Err(PredictError::NotCompact { index }),
                (-1, 1) => (1, 3),
                (1, -1) => (3, 1),
                _ => (2, 2),
            },
        };
        for (copy, height, degree) in [(1u8, it.value, lower), (2u8, it.value + a, upper)] {
            vertices.push(PredictedVertex {
                height,
                degree,
                item: index,
                copy,
                locus: it.locus,
            });
        }
    }
    Ok(PredictedVertices { a, vertices })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionMatch {
    /// Compared height range `[h_min + a, h_max - a]`.
    pub range: (f64, f64),
    pub predicted: Vec<(f64, usize)>,
    pub sweep: Vec<(f64, usize)>,
    pub matched: bool,
}

/// Compares the predicted `(height, degree)` multiset with the sweep's
/// non-cut vertices inside `[h_min + a, h_max - a]`. Predicted vertices
/// whose contour is clipped by the window are dropped.
pub fn compare_prediction(
    graph: &ReebGraph,
    prediction: &PredictedVertices,
    region: &StripRegion,
    tol: f64,
) -> Result<PredictionMatch, RegionError> {
    let (h_min, h_max) = region.height_range()?;
    let range = (h_min + prediction.a, h_max - prediction.a);
    let inside = |h: f64| h >= range.0 - tol && h <= range.1 + tol;
    let w = region.window;

    let mut predicted = Vec::new();
    for v in &prediction.vertices {
        if !inside(v.height) {
            continue;
        }
        let s = v.locus.centre();
        let contour = slice_between(region, v.height - 1e-9, v.height + 1e-9)?;
        let clipped = match contour.iter().find(|iv| iv.contains(s)) {
            Some(iv) => iv.a <= w.lo || iv.b >= w.hi,
            None => s <= w.lo || s >= w.hi,
        };
        if !clipped {
            predicted.push((v.height, v.degree));
        }
    }
    let mut sweep: Vec<(f64, usize)> = graph.signature().into_iter().filter(|&(h, _)| inside(h)).collect();
    let key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    predicted.sort_by(key);
    sweep.sort_by(key);

    let mut used = vec![false; sweep.len()];
    let mut matched = predicted.len() == sweep.len();
    for p in &predicted {
        let hit = sweep
            .iter()
            .enumerate()
            .position(|(k, q)| !used[k] && q.1 == p.1 && (q.0 - p.0).abs() <= tol);
        match hit {
            Some(k) => used[k] = true,
            None => matched = false,
        }
    }
    Ok(PredictionMatch {
        range,
        predicted,
        sweep,
        matched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::find_critical_set;
    use crate::reeb::{build_reeb_graph, SweepOptions};
    use crate::strip::{make_region, TsFunction};
    use crate::{Tolerances, Window};

    fn crit(text: &str, w: Window) -> CriticalSet {
        find_critical_set(&TsFunction::from_expr_text(text).unwrap(), w, &Tolerances::default()).unwrap()
    }

    #[test]
    fn sine_prediction_per_period() {
        let p = predict_mthm2(&crit("sin(x)", Window::symmetric(7.0)), 1.0).unwrap();
        let mut sig: Vec<(i64, usize)> = p
            .vertices
            .iter()
            .map(|v| ((v.height * 1e6).round() as i64, v.degree))
            .collect();
        sig.sort();
        assert_eq!(sig.len(), 8);
        for (h, d) in sig {
            let expect = match h {
                -1_000_000 => 1,
                0 | 1_000_000 => 3,
                2_000_000 => 1,
                _ => panic!("unexpected height {h}"),
            };
            assert_eq!(d, expect);
        }
    }

    #[test]
    fn cubic_non_extremum() {
        let p = predict_mthm2(&crit("x^3", Window::symmetric(2.0)), 0.5).unwrap();
        let sig: Vec<(f64, usize)> = p.vertices.iter().map(|v| (v.height, v.degree)).collect();
        assert_eq!(sig.len(), 2);
        assert!(sig[0].0.abs() < 1e-12 && sig[0].1 == 2);
        assert!((sig[1].0 - 0.5).abs() < 1e-12 && sig[1].1 == 2);
    }

    #[test]
    fn empty_and_invalid_shifts() {
        let p = predict_mthm2(&crit("x", Window::symmetric(2.0)), 0.3).unwrap();
        assert!(p.vertices.is_empty());
        let cs = crit("sin(x)", Window::symmetric(7.0));
        assert!(matches!(
            predict_mthm2(&cs, 2.0),
            Err(PredictError::HypothesisViolation { .. })
        ));
        assert!(matches!(predict_mthm2(&cs, 0.0), Err(PredictError::NonPositive(_))));
    }

    #[test]
    fn sweep_matches_prediction_for_sine() {
        let w = Window::symmetric(7.0);
        let r = make_region(
            TsFunction::from_expr_text("sin(x)").unwrap(),
            TsFunction::from_expr_text("sin(x)+1").unwrap(),
            w,
        )
        .unwrap();
        let g = build_reeb_graph(&r, &SweepOptions::default()).unwrap();
        let p = predict_mthm2(&crit("sin(x)", w), 1.0).unwrap();
        let m = compare_prediction(&g, &p, &r, 1e-6).unwrap();
        assert!(m.matched, "{m:?}");
        assert_eq!(m.sweep.len(), 4);
    }
}
