//! Bracketed root finding for the monotone scalar relations used by the
//! kinematics and the joint balance.

/// Why a bisection could not run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BisectError {
    /// `f(lo)` and `f(hi)` have the same strict sign.
    NoSignChange { f_lo: f64, f_hi: f64 },
    /// A non-finite value was produced inside the bracket.
    NonFinite,
}

/// Find a root of `f` in `[lo, hi]` by bisection.
///
/// The bracket must satisfy `f(lo) <= 0 <= f(hi)` or the reverse. Iteration
/// stops once `|f(mid)| <= f_tol` or the bracket is narrower than `x_tol`,
/// and always within 200 halvings.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, f_tol: f64) -> Result<f64, BisectError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if !fa.is_finite() || !fb.is_finite() {
        return Err(BisectError::NonFinite);
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(BisectError::NoSignChange { f_lo: fa, f_hi: fb });
    }
    let increasing = fa < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if !fm.is_finite() {
            return Err(BisectError::NonFinite);
        }
        if fm.abs() <= f_tol || (b - a) <= x_tol {
            return Ok(mid);
        }
        if (fm < 0.0) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
