//! Initial data: the wave at `t = 0` plus a localized bump.

use super::poisson::solve_poisson;
use super::{FluidState, Grid};
use crate::error::{NspError, Result};
use crate::wave_profile::ContactWaveField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpShape {
    /// `exp(-r^2)`.
    Gaussian,
    /// `exp(1 - 1/(1 - r^2))` for `|r| < 1`, zero outside.
    Compact,
}

/// `amplitude * weight_c * bump((x - center) / width)` added to channel `c`
/// of `(v, u, theta)`. The temperature channel is further multiplied by
/// `1 - exp(-(x / width)^2)` so that it vanishes at the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub shape: BumpShape,
    pub weights: [f64; 3],
}

impl Perturbation {
    pub fn none() -> Self {
        Self {
            amplitude: 0.0,
            center: 0.0,
            width: 1.0,
            shape: BumpShape::Gaussian,
            weights: [0.0; 3],
        }
    }

    pub fn bump(&self, x: f64) -> f64 {
        let r = (x - self.center) / self.width;
        match self.shape {
            BumpShape::Gaussian => (-r * r).exp(),
            BumpShape::Compact => {
                if r.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Cutoff applied to the temperature channel.
    pub fn boundary_cutoff(&self, x: f64) -> f64 {
        1.0 - (-(x / self.width).powi(2)).exp()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(NspError::InvalidInput(format!("bump width must be positive, got {}", self.width)));
        }
        if !(self.amplitude.is_finite() && self.center.is_finite()) || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(NspError::InvalidInput("perturbation parameters must be finite".into()));
        }
        Ok(())
    }
}

/// Wave at `t = 0` plus `pert` on the grid, with `phi` from a fresh Poisson solve.
pub fn make_initial_data(
    wave: &ContactWaveField,
    pert: &Perturbation,
    grid: &Grid,
    newton_tol: f64,
    newton_max: usize,
) -> Result<FluidState> {
    pert.validate()?;
    let n = grid.nodes();
    let mut state = FluidState {
        t: 0.0,
        v: vec![0.0; n],
        u: vec![0.0; n],
        theta: vec![0.0; n],
        phi: vec![0.0; n],
    };
    let eps = pert.amplitude;
    let [wv, wu, wt] = pert.weights;
    for i in 0..n {
        let x = grid.x(i);
        let s = wave.evaluate_wave(x, 0.0)?;
        let b = pert.bump(x);
        state.v[i] = s.v + eps * wv * b;
        state.u[i] = s.u + eps * wu * b;
        state.theta[i] = s.theta + eps * wt * b * pert.boundary_cutoff(x);
        state.phi[i] = s.phi;
    }
    state.theta[0] = wave.ends().theta_minus;
    state.check_positivity()?;
    let e = wave.ends();
    let sol = solve_poisson(
        &state.v,
        wave.model(),
        (e.phi_minus, e.phi_plus),
        grid,
        &state.phi,
        newton_tol,
        newton_max,
    )?;
    state.phi = sol.phi;
    Ok(state)
}
