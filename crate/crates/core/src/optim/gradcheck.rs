/// Magnitude below which components are compared absolutely. Central
/// differences at eps = 1e-5 carry roundoff near 1e-11 on O(1) losses.
pub const GRADIENT_FLOOR: f64 = 1e-6;

/// `|a - n| / max(|a|, |n|, GRADIENT_FLOOR)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(GRADIENT_FLOOR)
}

/// Central differences of `loss` at `point`, one coordinate at a time.
pub fn numeric_gradient<F>(mut loss: F, point: &[f64], eps: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut x = point.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + eps;
            let plus = loss(&x);
            x[i] = orig - eps;
            let minus = loss(&x);
            x[i] = orig;
            (plus - minus) / (2.0 * eps)
        })
        .collect()
}

/// Maximum relative error between `analytic` and central differences of `loss`.
pub fn gradient_check<F>(loss: F, point: &[f64], analytic: &[f64], eps: f64) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(point.len(), analytic.len());
    numeric_gradient(loss, point, eps)
        .iter()
        .zip(analytic)
        .map(|(&n, &a)| relative_error(a, n))
        .fold(0.0, f64::max)
}
