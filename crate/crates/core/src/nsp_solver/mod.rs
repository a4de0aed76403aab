//! Semi-implicit finite-difference solver for the Lagrangian system on a
//! truncated half-line `[0, L]`.
//!
//! Nodes `x_i = i h`, `i = 0..=N`, carry `(v, u, theta, phi)`. At `x = 0`
//! the stress condition `R theta_- / v - mu u_x / v = p_-`, the temperature
//! `theta_-` and the potential `phi_-` are imposed; at `x = L` the far-field
//! state is imposed (or zero fluxes, see [`FarFieldBc`]).

mod initial;
mod poisson;
mod run;
mod snapshot;
mod step;

pub use initial::{make_initial_data, BumpShape, Perturbation};
pub use poisson::{solve_poisson, solve_poisson_forced, PoissonSolution};
pub use run::{run, RunFailure, RunOutcome};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
pub use step::{step, StepReport, Stepper};

use crate::error::{NspError, Result};

/// Uniform grid on `[0, L]` with `N` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    l: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub const MIN_CELLS: usize = 16;

    pub fn new(l: f64, n: usize) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(NspError::InvalidInput(format!("domain length must be positive, got {l}")));
        }
        if n < Self::MIN_CELLS {
            return Err(NspError::InvalidInput(format!(
                "grid needs at least {} cells, got {n}",
                Self::MIN_CELLS
            )));
        }
        Ok(Self { l, n, h: l / n as f64 })
    }

    pub fn length(&self) -> f64 {
        self.l
    }

    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.n
    }

    /// Number of nodes, `N + 1`.
    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

/// Discrete fields at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl FluidState {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Fails on the first nonpositive or non-finite volume or temperature.
    pub fn check_positivity(&self) -> Result<()> {
        for (field, values) in [("v", &self.v), ("theta", &self.theta)] {
            if let Some((index, &value)) = values.iter().enumerate().find(|(_, x)| !(**x > 0.0 && x.is_finite())) {
                return Err(NspError::Positivity {
                    field,
                    index,
                    value,
                    t: self.t,
                });
            }
        }
        Ok(())
    }

    fn check_shape(&self, grid: &Grid) -> Result<()> {
        let n = grid.nodes();
        if [self.v.len(), self.u.len(), self.theta.len(), self.phi.len()] != [n; 4] {
            return Err(NspError::InvalidInput(format!("state arrays must have {n} nodes")));
        }
        Ok(())
    }
}

/// Treatment of the truncation point `x = L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FarFieldBc {
    /// `u = u_+`, `theta = theta_+`, `phi = phi_+`.
    Dirichlet,
    /// Zero viscous and heat fluxes; `phi = phi_+`.
    NeumannZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Largest time step; the CFL bound may reduce it.
    pub dt: f64,
    pub t_end: f64,
    /// Implicitness of viscosity and conduction: 1 is backward Euler,
    /// 1/2 is Crank–Nicolson.
    pub theta_scheme: f64,
    pub newton_tol: f64,
    pub newton_max: usize,
    pub far_field_bc: FarFieldBc,
    pub cfl_safety: f64,
    /// Interval between diagnostics records; steps land on its multiples.
    pub cadence: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            t_end: 1.0,
            theta_scheme: 1.0,
            newton_tol: 1e-10,
            newton_max: 50,
            far_field_bc: FarFieldBc::Dirichlet,
            cfl_safety: 0.5,
            cadence: 0.1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(NspError::InvalidInput(m));
        if !(self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if !(0.0..=1.0).contains(&self.theta_scheme) {
            return bad(format!("theta_scheme must lie in [0, 1], got {}", self.theta_scheme));
        }
        if !(self.newton_tol > 0.0) || self.newton_max == 0 {
            return bad("newton_tol and newton_max must be positive".into());
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety));
        }
        if !(self.cadence > 0.0) {
            return bad(format!("cadence must be positive, got {}", self.cadence));
        }
        Ok(())
    }
}
