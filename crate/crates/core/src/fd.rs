//! Fourth-order finite-difference stencils.

/// Fourth-order first derivative of uniformly spaced samples; biased
/// five-point stencils at the two ends. Needs at least five samples.
pub fn derivative4(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "derivative4 needs at least five samples");
    let f = values;
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * h);
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for j in 2..n - 2 {
        d[j] = c * (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]);
    }
    let m = n - 1;
    d[m] = -c * (-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]);
    d[m - 1] = -c * (-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]);
    d
}

/// Centered first derivative from samples at offsets -2h..2h.
#[inline]
pub fn central_d1(f: [f64; 5], h: f64) -> f64 {
    (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h)
}

/// Centered second derivative from samples at offsets -2h..2h.
#[inline]
pub fn central_d2(f: [f64; 5], h: f64) -> f64 {
    (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
}

/// Forward first derivative from samples at offsets 0..4h.
#[inline]
pub fn forward_d1(f: [f64; 5], h: f64) -> f64 {
    (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h)
}
