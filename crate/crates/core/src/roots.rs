//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection for an increasing-through-zero or decreasing-through-zero
/// `f` on `[lo, hi]`, stopping when the bracket is narrower than
/// `rel_tol · max(|lo|, |hi|)` or `abs_tol`.
pub fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Root(format!(
            "bracket [{lo:e}, {hi:e}] does not straddle a root (f = {flo:e}, {fhi:e})"
        )));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * lo.abs().max(hi.abs()) || hi - lo <= abs_tol {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One Newton step from `x`, kept only if it stays inside `[lo, hi]` and
/// reduces |f|.
pub fn newton_polish(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    x: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let fx = f(x);
    let d = df(x);
    if !(d.is_finite() && d != 0.0) {
        return x;
    }
    let y = x - fx / d;
    if y > lo && y < hi && f(y).abs() < fx.abs() {
        y
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 0.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-15, 0.0).is_err());
    }

    #[test]
    fn resolves_tiny_roots_relatively() {
        let r = bisect(|x| x - 1e-250, 0.0, 1.0, 1e-14, 0.0).unwrap();
        assert!((r / 1e-250 - 1.0).abs() < 1e-13);
    }
}
