//! Scalar root finding and maximization.

use crate::error::{Error, Result};
use crate::num::{lit, Real};

/// Bisection on a bracketing interval. `f(lo)` and `f(hi)` must differ in
/// sign (or one endpoint be an exact root). Shrinks the interval below
/// `tol_x` and returns the midpoint.
pub fn bisect<F: Real>(f: impl Fn(F) -> F, mut lo: F, mut hi: F, tol_x: F) -> Result<F> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == F::zero() {
        return Ok(lo);
    }
    if fhi == F::zero() {
        return Ok(hi);
    }
    if (flo > F::zero()) == (fhi > F::zero()) {
        return Err(Error::Invalid(format!(
            "bisect: no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    let two = lit::<F>(2.0);
    for _ in 0..200 {
        let mid = (lo + hi) / two;
        if hi - lo <= tol_x || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == F::zero() {
            return Ok(mid);
        }
        if (fmid > F::zero()) == (flo > F::zero()) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: Real>(f: impl Fn(F) -> F, mut lo: F, mut hi: F, tol_x: F) -> F {
    let inv_phi = lit::<F>(0.618_033_988_749_894_9);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if hi - lo <= tol_x {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    (lo + hi) / lit(2.0)
}

/// Minimizes `f` on `[lo, hi]` (golden section on `-f`).
pub fn golden_min<F: Real>(f: impl Fn(F) -> F, lo: F, hi: F, tol_x: F) -> F {
    golden_max(|x| -f(x), lo, hi, tol_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn bisect_rejects_non_bracket() {
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let m = golden_max(|x: f64| -(x - 1.3) * (x - 1.3), -5.0, 5.0, 1e-12);
        assert_relative_eq!(m, 1.3, epsilon = 1e-9);
    }
}
