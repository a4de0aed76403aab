//! Tridiagonal (Thomas) solver shared by the BVP, Poisson and implicit
//! diffusion kernels.

use crate::error::{NspError, Result};

/// A tridiagonal system with `lower[0]` and `upper[n-1]` ignored.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Turns row `i` into the identity row `x_i = value`, writing `value` into `rhs`.
    pub fn pin(&mut self, i: usize, rhs: &mut [f64], value: f64) {
        self.lower[i] = 0.0;
        self.diag[i] = 1.0;
        self.upper[i] = 0.0;
        rhs[i] = value;
    }

    /// Matrix-vector product, used for residual checks.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solves `A x = rhs` without pivoting.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(NspError::InvalidInput(format!(
                "tridiagonal rhs has length {} but system has {}",
                rhs.len(),
                n
            )));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        if denom == 0.0 || !denom.is_finite() {
            return Err(NspError::Invariant("singular tridiagonal pivot at row 0".into()));
        }
        c[0] = self.upper[0] / denom;
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.lower[i] * c[i - 1];
            if denom == 0.0 || !denom.is_finite() {
                return Err(NspError::Invariant(format!(
                    "singular tridiagonal pivot at row {i}"
                )));
            }
            c[i] = if i + 1 < n { self.upper[i] / denom } else { 0.0 };
            d[i] = (rhs[i] - self.lower[i] * d[i - 1]) / denom;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_diagonally_dominant_system() {
        let n = 50;
        let mut a = Tridiagonal::zeros(n);
        for i in 0..n {
            a.lower[i] = -1.0;
            a.diag[i] = 4.0 + (i as f64) * 0.01;
            a.upper[i] = -1.5;
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let rhs = a.apply(&x_true);
        let x = a.solve(&rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_zero_pivot() {
        let a = Tridiagonal::zeros(3);
        assert!(a.solve(&[1.0, 1.0, 1.0]).is_err());
    }
}
