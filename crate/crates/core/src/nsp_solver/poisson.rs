//! Newton solver for `(phi_x / v)_x = 1 - v rho_e(phi)` with Dirichlet data.

use super::Grid;
use crate::electron_density::ElectronDensityModel;
use crate::error::{NspError, Result};
use crate::linalg::Tridiagonal;

const DAMPING_FLOOR: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    pub phi: Vec<f64>,
    pub iterations: usize,
    /// Max-norm residual before each iteration and after the last one.
    pub residual_history: Vec<f64>,
}

struct Problem<'a> {
    v: &'a [f64],
    model: &'a ElectronDensityModel,
    h2: f64,
    source: Option<&'a [f64]>,
}

impl Problem<'_> {
    fn residual(&self, phi: &[f64]) -> Result<Vec<f64>> {
        let n = phi.len();
        let v = self.v;
        let mut r = vec![0.0; n];
        for i in 1..n - 1 {
            let vp = 0.5 * (v[i] + v[i + 1]);
            let vm = 0.5 * (v[i] + v[i - 1]);
            let flux = ((phi[i + 1] - phi[i]) / vp - (phi[i] - phi[i - 1]) / vm) / self.h2;
            let src = self.source.map_or(0.0, |s| s[i]);
            r[i] = flux - 1.0 + v[i] * self.model.density(phi[i])? - src;
        }
        Ok(r)
    }

    fn jacobian(&self, phi: &[f64]) -> Result<Tridiagonal> {
        let n = phi.len();
        let v = self.v;
        let mut jac = Tridiagonal::zeros(n);
        for i in 1..n - 1 {
            let cp = 1.0 / (0.5 * (v[i] + v[i + 1]) * self.h2);
            let cm = 1.0 / (0.5 * (v[i] + v[i - 1]) * self.h2);
            let (d1, _) = self.model.density_derivatives(phi[i])?;
            jac.lower[i] = cm;
            jac.upper[i] = cp;
            jac.diag[i] = -cp - cm + v[i] * d1;
        }
        jac.diag[0] = 1.0;
        jac.diag[n - 1] = 1.0;
        Ok(jac)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves the discrete Poisson problem
/// `[(phi_{i+1} - phi_i)/v_{i+1/2} - (phi_i - phi_{i-1})/v_{i-1/2}] / h^2 = 1 - v_i rho_e(phi_i)`
/// with `phi_0 = phi_bc.0`, `phi_N = phi_bc.1` and `v_{i+1/2}` the mean of the
/// neighbouring volumes. Newton steps are halved until the residual decreases.
pub fn solve_poisson(
    v: &[f64],
    model: &ElectronDensityModel,
    phi_bc: (f64, f64),
    grid: &Grid,
    guess: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<PoissonSolution> {
    solve(v, model, phi_bc, grid, guess, tol, max_iter, None)
}

/// As [`solve_poisson`] with an extra source: the right side becomes
/// `1 - v rho_e(phi) + source`.
#[allow(clippy::too_many_arguments)]
pub fn solve_poisson_forced(
    v: &[f64],
    model: &ElectronDensityModel,
    phi_bc: (f64, f64),
    grid: &Grid,
    guess: &[f64],
    tol: f64,
    max_iter: usize,
    source: &[f64],
) -> Result<PoissonSolution> {
    if source.len() != v.len() {
        return Err(NspError::InvalidInput("source length differs from grid".into()));
    }
    solve(v, model, phi_bc, grid, guess, tol, max_iter, Some(source))
}

#[allow(clippy::too_many_arguments)]
fn solve(
    v: &[f64],
    model: &ElectronDensityModel,
    phi_bc: (f64, f64),
    grid: &Grid,
    guess: &[f64],
    tol: f64,
    max_iter: usize,
    source: Option<&[f64]>,
) -> Result<PoissonSolution> {
    let n = grid.nodes();
    if v.len() != n || guess.len() != n {
        return Err(NspError::InvalidInput(format!("Poisson arrays must have {n} nodes")));
    }
    if let Some(i) = v.iter().position(|&x| !(x > 0.0)) {
        return Err(NspError::Positivity {
            field: "v",
            index: i,
            value: v[i],
            t: f64::NAN,
        });
    }
    let prob = Problem {
        v,
        model,
        h2: grid.h() * grid.h(),
        source,
    };
    let mut phi = guess.to_vec();
    phi[0] = phi_bc.0;
    phi[n - 1] = phi_bc.1;
    let mut res = prob.residual(&phi)?;
    let mut norm = max_abs(&res);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm > tol {
        if iterations == max_iter {
            return Err(NspError::NewtonDivergence {
                context: "Poisson equation".into(),
                iterations,
                residual: norm,
            });
        }
        iterations += 1;
        let jac = prob.jacobian(&phi)?;
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let step = jac.solve(&rhs)?;
        let scale = 1.0 + max_abs(&phi);
        let full_step = max_abs(&step);
        let mut lambda = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = phi.iter().zip(&step).map(|(p, s)| p + lambda * s).collect();
            if let Ok(r) = prob.residual(&trial) {
                let trial_norm = max_abs(&r);
                if trial_norm < norm {
                    break Some((trial, r, trial_norm));
                }
            }
            if lambda <= DAMPING_FLOOR {
                break None;
            }
            lambda *= 0.5;
        };
        match accepted {
            Some((p, r, nn)) => {
                phi = p;
                res = r;
                norm = nn;
                history.push(norm);
            }
            // The residual sits at rounding level for this grid.
            None if full_step <= 8.0 * f64::EPSILON * scale => break,
            None => {
                return Err(NspError::NewtonDivergence {
                    context: "Poisson equation (no decrease along the Newton direction)".into(),
                    iterations,
                    residual: norm,
                })
            }
        }
    }
    Ok(PoissonSolution {
        phi,
        iterations,
        residual_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasineutral_equilibrium_needs_no_iteration() {
        let model = ElectronDensityModel::boltzmann(1.0).unwrap();
        let grid = Grid::new(10.0, 64).unwrap();
        let v = vec![1.3; 65];
        let phi_eq = model.inverse_density(1.0 / 1.3).unwrap();
        let sol = solve_poisson(&v, &model, (phi_eq, phi_eq), &grid, &vec![phi_eq; 65], 1e-10, 50).unwrap();
        assert_eq!(sol.iterations, 0);
        assert!(sol.phi.iter().all(|&p| (p - phi_eq).abs() <= 1e-12));
    }

    #[test]
    fn residual_history_is_nonincreasing() {
        let model = ElectronDensityModel::generalized(2.0, 1.0).unwrap();
        let grid = Grid::new(5.0, 100).unwrap();
        let v: Vec<f64> = (0..=100).map(|i| 1.0 + 0.2 * (-(i as f64 * 0.05 - 2.0).powi(2)).exp()).collect();
        let sol = solve_poisson(&v, &model, (0.1, 0.0), &grid, &vec![0.0; 101], 1e-10, 50).unwrap();
        assert!(sol.residual_history.windows(2).all(|w| w[1] <= w[0]));
        assert!(*sol.residual_history.last().unwrap() <= 1e-10);
    }
}
