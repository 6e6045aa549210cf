use crate::error::{Error, Result};

/// Relative error `|a - n| / max(|a|, |n|)` (Euclidean norms) between an
/// analytic gradient `a` and central differences
/// `n_j = (L(p + eps e_j) - L(p - eps e_j)) / 2 eps`.
///
/// Norms rather than per-coordinate ratios keep coordinates whose true
/// gradient sits near the finite-difference noise floor from dominating.
pub fn gradient_check<F>(mut loss: F, analytic: &[f64], point: &[f64], eps: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(analytic.len(), point.len(), "gradient and point differ in length");
    if !loss(point).is_finite() {
        return Err(Error::NonFiniteLoss);
    }
    let mut p = point.to_vec();
    let mut diff = 0.0;
    let mut a_sq = 0.0;
    let mut n_sq = 0.0;
    for j in 0..p.len() {
        let orig = p[j];
        p[j] = orig + eps;
        let up = loss(&p);
        p[j] = orig - eps;
        let down = loss(&p);
        p[j] = orig;
        if !(up.is_finite() && down.is_finite()) {
            return Err(Error::NonFiniteLoss);
        }
        let numeric = (up - down) / (2.0 * eps);
        let a = analytic[j];
        diff += (a - numeric) * (a - numeric);
        a_sq += a * a;
        n_sq += numeric * numeric;
    }
    let scale = a_sq.max(n_sq).sqrt();
    Ok(if scale == 0.0 { 0.0 } else { diff.sqrt() / scale })
}
