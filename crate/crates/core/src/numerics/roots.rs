use crate::error::{GmlError, Result};

/// Root of a nondecreasing function bracketed by `[lo, hi]`, by bisection.
///
/// Requires `f(lo) ≤ 0 ≤ f(hi)`. Returns the midpoint of the final bracket,
/// whose width is at most `tol` (or a single ulp when `tol` is below that).
pub fn try_find_root_increasing<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(GmlError::Precondition(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(GmlError::Precondition("tolerance must be positive".into()));
    }
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.is_nan() || f_hi.is_nan() {
        return Err(GmlError::domain("function is NaN at the bracket ends"));
    }
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(GmlError::Precondition(format!(
            "bracket does not straddle a root: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm.is_nan() {
            return Err(GmlError::Domain(format!("function is NaN at {mid}")));
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

pub fn find_root_increasing<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_find_root_increasing(|x| Ok(f(x)), lo, hi, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_roots() {
        let x = find_root_increasing(|x| x - 1.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((x - 1.0).abs() <= 1e-14);
        let x = find_root_increasing(|x| x * x * x - 8.0, 0.0, 3.0, 1e-13).unwrap();
        assert!((x - 2.0).abs() <= 1e-13);
    }

    #[test]
    fn invalid_bracket() {
        assert!(matches!(
            find_root_increasing(|x| x - 5.0, 0.0, 2.0, 1e-12),
            Err(GmlError::Precondition(_))
        ));
        assert!(find_root_increasing(|x| x, 2.0, 0.0, 1e-12).is_err());
    }

    proptest! {
        #[test]
        fn monotone_cubics(root in -5.0f64..5.0, c1 in 0.0f64..3.0, c3 in 0.01f64..2.0, tol in 1e-12f64..1e-3) {
            let f = |x: f64| c3 * (x - root).powi(3) + c1 * (x - root);
            let x = find_root_increasing(f, -10.0, 10.0, tol).unwrap();
            prop_assert!((x - root).abs() <= tol);
        }
    }
}
