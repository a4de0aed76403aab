//! Least-squares line fits used for decay rates and scaling exponents.

use crate::error::{NspError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Undefined (`None`) when the data has no variance.
    pub r_squared: Option<f64>,
}

/// Ordinary least squares `y ~ slope x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(NspError::InvalidInput("line fit needs two or more paired samples".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(NspError::InvalidInput("line fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    // Relative threshold: variance indistinguishable from rounding counts as constant.
    if syy <= 1e-28 * (my * my * n).max(f64::MIN_POSITIVE) {
        return Ok(LineFit {
            slope: 0.0,
            intercept: my,
            r_squared: None,
        });
    }
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (my + slope * (x - mx))).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared: Some((1.0 - ss_res / syy).clamp(0.0, 1.0)),
    })
}

fn logs(values: &[f64], what: &str) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&q| {
            if q > 0.0 && q.is_finite() {
                Ok(q.ln())
            } else {
                Err(NspError::InvalidInput(format!("{what} must be positive, got {q}")))
            }
        })
        .collect()
}

/// Slope of `log q` against `log(1 + t)`; needs at least four samples.
pub fn decay_fit(samples: &[(f64, f64)]) -> Result<LineFit> {
    if samples.len() < 4 {
        return Err(NspError::InvalidInput(format!(
            "decay fit needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    let xs: Vec<f64> = samples.iter().map(|s| (1.0 + s.0).ln()).collect();
    let ys = logs(&samples.iter().map(|s| s.1).collect::<Vec<_>>(), "q")?;
    fit_line(&xs, &ys)
}

/// Slope of `log y` against `log x`.
pub fn power_exponent(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    fit_line(&logs(xs, "x")?, &logs(ys, "y")?)
}

/// Slope of `log |y|` against `t`.
pub fn exponential_rate(ts: &[f64], ys: &[f64]) -> Result<LineFit> {
    let abs: Vec<f64> = ys.iter().map(|y| y.abs()).collect();
    fit_line(ts, &logs(&abs, "|y|")?)
}
