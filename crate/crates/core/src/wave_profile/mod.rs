//! Viscous contact wave of the quasineutral system.
//!
//! The temperature profile is self-similar in `xi = x / sqrt(1 + t)` and
//! solves a nonlinear diffusion equation; specific volume, potential and
//! velocity follow from it through the quasineutral pressure balance.

mod analysis;
mod closure;
mod field;
mod self_similar;
mod table;

pub use analysis::{DecayIntegrals, ResidualSup, TailEnvelope};
pub use closure::{ClosurePoint, QuasineutralClosure};
pub use field::{ContactWaveField, WaveSample};
pub use self_similar::{solve_self_similar, SelfSimilarNumerics, SelfSimilarProfile};
pub use table::{read_profile_table, write_profile_table};

use crate::electron_density::ElectronDensityModel;
use crate::error::{NspError, Result};

/// Gas and transport constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    /// Gas constant.
    pub r: f64,
    /// Adiabatic exponent, greater than one.
    pub gamma: f64,
    /// Viscosity.
    pub mu: f64,
    /// Heat conductivity.
    pub kappa: f64,
}

impl GasParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, v: f64| NspError::InvalidInput(format!("{name} must be positive, got {v}"));
        if !(self.r > 0.0) {
            return Err(bad("R", self.r));
        }
        if !(self.gamma > 1.0) {
            return Err(NspError::InvalidInput(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        if !(self.mu > 0.0) {
            return Err(bad("mu", self.mu));
        }
        if !(self.kappa > 0.0) {
            return Err(bad("kappa", self.kappa));
        }
        Ok(())
    }

    pub fn pressure(&self, v: f64, theta: f64) -> f64 {
        self.r * theta / v
    }

    /// Specific heat at constant volume, `R / (gamma - 1)`.
    pub fn cv(&self) -> f64 {
        self.r / (self.gamma - 1.0)
    }
}

impl Default for GasParams {
    fn default() -> Self {
        Self {
            r: 1.0,
            gamma: 5.0 / 3.0,
            mu: 1.0,
            kappa: 1.0,
        }
    }
}

/// Far-field state to the right of the contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RightState {
    pub v_plus: f64,
    pub u_plus: f64,
    pub theta_plus: f64,
}

/// End states of the contact discontinuity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannEndStates {
    pub v_minus: f64,
    pub v_plus: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub phi_minus: f64,
    pub phi_plus: f64,
    pub p_minus: f64,
    pub delta: f64,
}

impl RiemannEndStates {
    pub fn right(&self) -> RightState {
        RightState {
            v_plus: self.v_plus,
            u_plus: self.u_plus,
            theta_plus: self.theta_plus,
        }
    }

    pub fn p_plus(&self, gas: &GasParams) -> f64 {
        gas.pressure(self.v_plus, self.theta_plus)
    }

    /// Checks the jump conditions and potential consistency.
    pub fn validate(&self, model: &ElectronDensityModel, gas: &GasParams) -> Result<()> {
        const TOL: f64 = 1e-10;
        if self.u_minus != self.u_plus {
            return Err(NspError::Invariant("u_minus differs from u_plus".into()));
        }
        if self.delta != (self.theta_plus - self.theta_minus).abs() {
            return Err(NspError::Invariant("delta is not |theta_plus - theta_minus|".into()));
        }
        let lhs = gas.pressure(self.v_minus, self.theta_minus);
        let rhs = self.p_plus(gas) - model.quasineutral_pressure(self.v_minus, self.v_plus)?;
        if (lhs - rhs).abs() > TOL * lhs.abs().max(1.0) {
            return Err(NspError::Invariant(format!(
                "pressure jump condition violated: {lhs} vs {rhs}"
            )));
        }
        if (lhs - self.p_minus).abs() > TOL * lhs.abs().max(1.0) {
            return Err(NspError::Invariant("p_minus differs from p(v_-, theta_-)".into()));
        }
        for (phi, v) in [(self.phi_minus, self.v_minus), (self.phi_plus, self.v_plus)] {
            if (phi - model.inverse_density(1.0 / v)?).abs() > TOL {
                return Err(NspError::Invariant("phi_pm inconsistent with v_pm".into()));
            }
        }
        Ok(())
    }
}
