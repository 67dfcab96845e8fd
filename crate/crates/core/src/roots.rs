//! Bracketing root refinement.

/// Bisects a sign change of `f` on `[lo, hi]` until the bracket is narrower
/// than `width` (or stops shrinking in floating point). `f_lo` is `f(lo)`;
/// the caller guarantees `f(lo)` and `f(hi)` have opposite signs.
///
/// Returns the final bracket.
pub(crate) fn bisect<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    width: f64,
) -> Result<(f64, f64), E> {
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Root of `g` inside a bracket, finished with one Newton step when that
/// step stays inside the bracket. `g` returns `(g, g')`.
pub(crate) fn refine_root<E>(
    mut g: impl FnMut(f64) -> Result<(f64, f64), E>,
    lo: f64,
    hi: f64,
    g_lo: f64,
    width: f64,
) -> Result<f64, E> {
    let (a, b) = bisect(|s| g(s).map(|v| v.0), lo, hi, g_lo, width)?;
    let mid = 0.5 * (a + b);
    if a == b {
        return Ok(mid);
    }
    let (v, dv) = g(mid)?;
    if dv != 0.0 && dv.is_finite() {
        let step = mid - v / dv;
        if step >= a && step <= b {
            let (vs, _) = g(step)?;
            if vs.abs() <= v.abs() {
                return Ok(step);
            }
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_pi_over_two() {
        let r = refine_root(|s: f64| Ok::<_, ()>((s.cos(), -s.sin())), 1.0, 2.0, 1f64.cos(), 1e-12).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn bracket_width_respected() {
        let (a, b) = bisect(|s: f64| Ok::<_, ()>(s - 0.3), 0.0, 1.0, -0.3, 1e-6).unwrap();
        assert!(b - a <= 1e-6 && a <= 0.3 && 0.3 <= b);
    }
}
