//! Discrete norms on uniform grids.

use crate::quadrature::trapezoid_uniform;

/// Second-order first derivative: central inside, one-sided at the ends.
pub fn derivative2(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    if n < 3 {
        return vec![0.0; n];
    }
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    let m = n - 1;
    d[m] = (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]) / (2.0 * h);
    d
}

pub fn l2_norm(f: &[f64], h: f64) -> f64 {
    let sq: Vec<f64> = f.iter().map(|x| x * x).collect();
    trapezoid_uniform(&sq, h).sqrt()
}

/// `(||f||^2 + ||f_x||^2)^{1/2}`.
pub fn h1_norm(f: &[f64], h: f64) -> f64 {
    let d = derivative2(f, h);
    (l2_norm(f, h).powi(2) + l2_norm(&d, h).powi(2)).sqrt()
}

/// Max over nodes.
pub fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Discrete form of `sup |f| <= sqrt(2) ||f||^{1/2} ||f_x||^{1/2}` with the
/// constant enlarged to `sqrt(2) (1 + 10 h)`.
pub fn sobolev_check(f: &[f64], h: f64) -> bool {
    let sup = sup_norm(f);
    if sup == 0.0 {
        return true;
    }
    let d = derivative2(f, h);
    let bound = std::f64::consts::SQRT_2 * (1.0 + 10.0 * h) * (l2_norm(f, h) * l2_norm(&d, h)).sqrt();
    sup <= bound
}
