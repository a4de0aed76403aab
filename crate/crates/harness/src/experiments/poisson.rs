//! Poisson solver verification: manufactured solutions and equilibria.

use crate::error::Result;
use crate::summary::Check;
use nsp_core::diagnostics::power_exponent;
use nsp_core::nsp_solver::{solve_poisson, solve_poisson_forced, Grid};
use nsp_core::ElectronDensityModel;
use std::f64::consts::PI;

const LENGTH: f64 = 4.0;
const AMPLITUDE: f64 = 0.3;

/// Largest nodal error for `phi* = phi_b + a sin(pi x / L)` with
/// `v = 1 + 0.2 e^{-x}` on `n` cells.
fn manufactured_error(model: &ElectronDensityModel, phi_b: f64, n: usize) -> Result<(f64, f64)> {
    let k = PI / LENGTH;
    let phi = |x: f64| phi_b + AMPLITUDE * (k * x).sin();
    let v = |x: f64| 1.0 + 0.2 * (-x).exp();
    let grid = Grid::new(LENGTH, n)?;
    let xs: Vec<f64> = (0..=n).map(|i| grid.x(i)).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| v(x)).collect();
    let mut source = Vec::with_capacity(n + 1);
    for &x in &xs {
        // (phi'/v)' = phi''/v - phi' v' / v^2.
        let (p1, p2) = (AMPLITUDE * k * (k * x).cos(), -AMPLITUDE * k * k * (k * x).sin());
        let (vv, dv) = (v(x), -0.2 * (-x).exp());
        let lhs = p2 / vv - p1 * dv / (vv * vv);
        source.push(lhs - 1.0 + vv * model.density(phi(x))?);
    }
    let sol = solve_poisson_forced(&vs, model, (phi_b, phi_b), &grid, &vec![phi_b; n + 1], 1e-13, 50, &source)?;
    let err = xs.iter().zip(&sol.phi).map(|(&x, p)| (p - phi(x)).abs()).fold(0.0, f64::max);
    Ok((grid.h(), err))
}

/// Manufactured-solution order over three refinements and the equilibrium
/// `v = 1 / rho_e(phi_b)` reproduced from a zero guess.
pub fn poisson_checks(model: &ElectronDensityModel) -> Result<Vec<Check>> {
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for n in [32, 64, 128, 256] {
        let (h, e) = manufactured_error(model, 0.0, n)?;
        hs.push(h);
        errs.push(e);
    }
    let order = power_exponent(&hs, &errs).map_or(f64::NAN, |f| f.slope);
    let mut checks = vec![Check::within("poisson_mms_order", order, 2.0, 0.1)];

    let phi_b = -0.3;
    let grid = Grid::new(LENGTH, 64)?;
    let v = vec![1.0 / model.density(phi_b)?; 65];
    let sol = solve_poisson(&v, model, (phi_b, phi_b), &grid, &vec![0.0; 65], 1e-14, 50)?;
    let err = sol.phi.iter().fold(0.0f64, |m, p| m.max((p - phi_b).abs()));
    checks.push(Check::at_most("poisson_equilibrium", err, 1e-12));
    Ok(checks)
}
