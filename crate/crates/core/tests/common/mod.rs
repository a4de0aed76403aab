#![allow(dead_code)]

use nsp_core::wave_profile::{
    ContactWaveField, GasParams, QuasineutralClosure, RightState, SelfSimilarNumerics,
};
use nsp_core::ElectronDensityModel;

pub fn boltzmann() -> ElectronDensityModel {
    ElectronDensityModel::boltzmann(1.0).unwrap()
}

pub fn unit_right() -> RightState {
    RightState {
        v_plus: 1.0,
        u_plus: 0.0,
        theta_plus: 1.0,
    }
}

/// Boltzmann wave with `theta_+ = 1`, `v_+ = 1` and the given left temperature.
pub fn wave_with(theta_minus: f64, kappa: f64, n_nodes: usize) -> ContactWaveField {
    let model = boltzmann();
    let gas = GasParams {
        kappa,
        ..Default::default()
    };
    let ends = QuasineutralClosure::from_theta_minus(unit_right(), theta_minus, &model, &gas).unwrap();
    let num = SelfSimilarNumerics {
        n_nodes,
        ..Default::default()
    };
    ContactWaveField::build(ends, model, gas, &num).unwrap()
}

/// The default baseline, strength 0.1.
pub fn baseline() -> ContactWaveField {
    wave_with(1.1, 1.0, 4001)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    nsp_core::diagnostics::power_exponent(xs, ys).unwrap().slope
}

/// Wave of strength 0.1 whose left pressure is exactly one: `theta_+` solves
/// `theta^2 - 0.1 theta - 1 = 0`, which gives `theta_- = 1/theta_+`.
pub fn unit_pressure_wave(mu: f64, n_nodes: usize) -> ContactWaveField {
    let model = boltzmann();
    let gas = GasParams {
        mu,
        ..Default::default()
    };
    let theta_star = 0.5 * (0.1 + 4.01f64.sqrt());
    let right = RightState {
        v_plus: 1.0,
        u_plus: 0.0,
        theta_plus: theta_star,
    };
    let ends = QuasineutralClosure::solve_left_state(right, 1.0, &model, &gas).unwrap();
    let num = SelfSimilarNumerics {
        n_nodes,
        ..Default::default()
    };
    ContactWaveField::build(ends, model, gas, &num).unwrap()
}
