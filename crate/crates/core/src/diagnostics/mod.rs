//! Perturbation fields, norms, energies, the boundary identity residual and
//! power-law fits.

mod fit;
mod norms;
mod record;

pub use fit::{decay_fit, exponential_rate, fit_line, power_exponent, LineFit};
pub use norms::{derivative2, h1_norm, l2_norm, sobolev_check, sup_norm};
pub use record::{DiagnosticsRecord, DiagnosticsTracker, SCHEMA_VERSION};

use crate::electron_density::ElectronDensityModel;
use crate::error::{NspError, Result};
use crate::nsp_solver::{FluidState, Grid};
use crate::quadrature::trapezoid_uniform;
use crate::wave_profile::{ContactWaveField, GasParams, WaveSample};

/// `(v - v^cd, u - u^cd, theta - theta^cd, phi - phi^cd)` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationFields {
    pub t: f64,
    pub varphi: Vec<f64>,
    pub psi: Vec<f64>,
    pub zeta: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl PerturbationFields {
    pub fn fields(&self) -> [&[f64]; 4] {
        [&self.varphi, &self.psi, &self.zeta, &self.sigma]
    }
}

/// The wave sampled at the grid nodes at time `t`.
pub fn sample_wave(wave: &ContactWaveField, grid: &Grid, t: f64) -> Result<Vec<WaveSample>> {
    (0..grid.nodes()).map(|i| wave.evaluate_wave(grid.x(i), t)).collect()
}

pub fn perturbation(state: &FluidState, grid: &Grid, wave: &ContactWaveField) -> Result<PerturbationFields> {
    let samples = sample_wave(wave, grid, state.t)?;
    perturbation_from_samples(state, &samples)
}

pub fn perturbation_from_samples(state: &FluidState, samples: &[WaveSample]) -> Result<PerturbationFields> {
    if samples.len() != state.len() {
        return Err(NspError::InvalidInput("wave samples do not match the state".into()));
    }
    let diff = |a: &[f64], f: fn(&WaveSample) -> f64| -> Vec<f64> {
        a.iter().zip(samples).map(|(x, s)| x - f(s)).collect()
    };
    Ok(PerturbationFields {
        t: state.t,
        varphi: diff(&state.v, |s| s.v),
        psi: diff(&state.u, |s| s.u),
        zeta: diff(&state.theta, |s| s.theta),
        sigma: diff(&state.phi, |s| s.phi),
    })
}

/// `Phi(s) = s - 1 - ln s`.
pub fn entropy_phi(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(NspError::Domain {
            what: "s",
            value: s,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    // ln_1p keeps accuracy near s = 1, where Phi(s) ~ (s - 1)^2 / 2.
    let d = s - 1.0;
    Ok(d - d.ln_1p())
}

/// Trapezoidal integral of
/// `psi^2/2 + R theta^cd Phi(v/v^cd) + c_v theta^cd Phi(theta/theta^cd)
///  + v^cd/2 |rho_e'(phi^cd)| sigma^2 + v^cd/(2 v^2) sigma_x^2`.
pub fn zero_order_energy(
    pert: &PerturbationFields,
    state: &FluidState,
    samples: &[WaveSample],
    model: &ElectronDensityModel,
    gas: &GasParams,
    grid: &Grid,
) -> Result<f64> {
    let n = state.len();
    if pert.varphi.len() != n || samples.len() != n {
        return Err(NspError::InvalidInput("energy inputs have mismatched lengths".into()));
    }
    let sigma_x = derivative2(&pert.sigma, grid.h());
    let mut integrand = Vec::with_capacity(n);
    for i in 0..n {
        let w = &samples[i];
        let (d1, _) = model.density_derivatives(w.phi)?;
        let e = 0.5 * pert.psi[i] * pert.psi[i]
            + gas.r * w.theta * entropy_phi(state.v[i] / w.v)?
            + gas.cv() * w.theta * entropy_phi(state.theta[i] / w.theta)?
            + 0.5 * w.v * d1.abs() * pert.sigma[i] * pert.sigma[i]
            + w.v / (2.0 * state.v[i] * state.v[i]) * sigma_x[i] * sigma_x[i];
        integrand.push(e);
    }
    Ok(trapezoid_uniform(&integrand, grid.h()))
}

/// `max_k |varphi(0, t_k) - varphi(0, t_0) exp(-p_- t_k / mu)|` over a history
/// starting at `t_0 = 0`.
pub fn boundary_identity_residual(history: &[(f64, f64)], p_minus: f64, mu: f64) -> f64 {
    let Some(&(_, phi0)) = history.first() else {
        return 0.0;
    };
    history
        .iter()
        .map(|&(t, phi)| (phi - phi0 * (-p_minus * t / mu).exp()).abs())
        .fold(0.0, f64::max)
}

/// `w(x, t) = int_0^x (theta^cd_x)^2`.
pub fn weight_w(wave: &ContactWaveField, x: f64, t: f64) -> f64 {
    wave.weight_w(x, t)
}
