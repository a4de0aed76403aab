//! One time step.
//!
//! Order of the substeps: momentum (implicit viscosity), volume (trapezoidal
//! in the new and old velocity divergence), energy (implicit conduction,
//! time-centred compression work and viscous heating), Poisson. Explicit
//! terms of the momentum equation are extrapolated to the half step from the
//! two previous states, so the scheme is second order in time for
//! `theta_scheme = 1/2`.

use super::poisson::solve_poisson;
use super::{FarFieldBc, FluidState, Grid, SolverConfig};
use crate::electron_density::ElectronDensityModel;
use crate::error::{NspError, Result};
use crate::linalg::Tridiagonal;
use crate::wave_profile::{GasParams, RiemannEndStates};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub poisson_iterations: usize,
    /// `max_i |(v_i^{n+1} - v_i^n)/dt - (u_x)_i^{n+1/2}|`.
    pub mass_defect: f64,
}

/// Advances states while remembering the previous one for extrapolation.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    cfg: SolverConfig,
    model: ElectronDensityModel,
    gas: GasParams,
    ends: RiemannEndStates,
    previous: Option<(FluidState, f64)>,
}

impl Stepper {
    pub fn new(
        grid: Grid,
        cfg: SolverConfig,
        model: ElectronDensityModel,
        gas: GasParams,
        ends: RiemannEndStates,
    ) -> Result<Self> {
        cfg.validate()?;
        gas.validate()?;
        Ok(Self {
            grid,
            cfg,
            model,
            gas,
            ends,
            previous: None,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// `min(cfg.dt, cfl_safety h / max(|u| + sqrt(gamma R theta)))`.
    pub fn stable_dt(&self, state: &FluidState) -> f64 {
        let speed = state
            .u
            .iter()
            .zip(&state.theta)
            .map(|(u, th)| u.abs() + (self.gas.gamma * self.gas.r * th).sqrt())
            .fold(0.0, f64::max);
        if speed > 0.0 {
            self.cfg.dt.min(self.cfg.cfl_safety * self.grid.h() / speed)
        } else {
            self.cfg.dt
        }
    }

    /// Forgets the stored previous state; the next step uses no extrapolation.
    pub fn reset_history(&mut self) {
        self.previous = None;
    }

    /// Advances `state` by `dt`.
    pub fn step(&mut self, state: &FluidState, dt: f64) -> Result<(FluidState, StepReport)> {
        state.check_shape(&self.grid)?;
        if !(dt > 0.0) {
            return Err(NspError::InvalidInput(format!("time step must be positive, got {dt}")));
        }
        let (next, report) = self.advance(state, dt)?;
        self.previous = Some((state.clone(), dt));
        Ok((next, report))
    }

    /// Values extrapolated to `t + dt/2` from the current and previous states.
    fn half_step(&self, cur: &[f64], pick: impl Fn(&FluidState) -> &Vec<f64>, dt: f64) -> Vec<f64> {
        match &self.previous {
            Some((prev, dt_prev)) => {
                let c = 0.5 * dt / dt_prev;
                cur.iter().zip(pick(prev)).map(|(a, b)| a + c * (a - b)).collect()
            }
            None => cur.to_vec(),
        }
    }

    fn divergence(&self, u: &[f64], v0: f64) -> Vec<f64> {
        let n = u.len();
        let h = self.grid.h();
        let mut d = vec![0.0; n];
        d[0] = (self.gas.r * self.ends.theta_minus - self.ends.p_minus * v0) / self.gas.mu;
        for i in 1..n - 1 {
            d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
        }
        let m = n - 1;
        d[m] = (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * h);
        d
    }

    fn advance(&self, s: &FluidState, dt: f64) -> Result<(FluidState, StepReport)> {
        let n = s.len();
        let m = n - 1;
        let h = self.grid.h();
        let gas = self.gas;
        let e = self.ends;
        let w = self.cfg.theta_scheme;
        let mu = gas.mu;
        let t_new = s.t + dt;

        // Momentum.
        let vs = self.half_step(&s.v, |p| &p.v, dt);
        let ths = self.half_step(&s.theta, |p| &p.theta, dt);
        let phis = self.half_step(&s.phi, |p| &p.phi, dt);
        if let Some(i) = vs.iter().position(|&x| !(x > 0.0)) {
            return Err(NspError::Positivity {
                field: "v",
                index: i,
                value: vs[i],
                t: s.t,
            });
        }
        let ps: Vec<f64> = ths.iter().zip(&vs).map(|(th, v)| gas.r * th / v).collect();
        let mut force = vec![0.0; n];
        force[0] = (-3.0 * phis[0] + 4.0 * phis[1] - phis[2]) / (2.0 * h) / vs[0];
        for i in 1..m {
            force[i] = (phis[i + 1] - phis[i - 1]) / (2.0 * h) / vs[i];
        }
        force[m] = (3.0 * phis[m] - 4.0 * phis[m - 1] + phis[m - 2]) / (2.0 * h) / vs[m];
        let vhalf = |v: &[f64], i: usize| 0.5 * (v[i] + v[i + 1]);

        let mut a = Tridiagonal::zeros(n);
        let mut rhs = vec![0.0; n];
        {
            let c = 2.0 * mu * dt / (h * h * vhalf(&vs, 0));
            a.diag[0] = 1.0 + w * c;
            a.upper[0] = -w * c;
            rhs[0] = s.u[0]
                + dt * 2.0 / h * (e.p_minus - 0.5 * (ps[0] + ps[1]))
                + (1.0 - w) * c * (s.u[1] - s.u[0])
                + dt * force[0];
        }
        for i in 1..m {
            let cp = mu * dt / (h * h * vhalf(&vs, i));
            let cm = mu * dt / (h * h * vhalf(&vs, i - 1));
            a.lower[i] = -w * cm;
            a.upper[i] = -w * cp;
            a.diag[i] = 1.0 + w * (cp + cm);
            let visc = cp * (s.u[i + 1] - s.u[i]) - cm * (s.u[i] - s.u[i - 1]);
            rhs[i] = s.u[i] - dt * (ps[i + 1] - ps[i - 1]) / (2.0 * h) + dt * force[i] + (1.0 - w) * visc;
        }
        match self.cfg.far_field_bc {
            FarFieldBc::Dirichlet => a.pin(m, &mut rhs, e.u_plus),
            FarFieldBc::NeumannZero => {
                let c = 2.0 * mu * dt / (h * h * vhalf(&vs, m - 1));
                a.diag[m] = 1.0 + w * c;
                a.lower[m] = -w * c;
                rhs[m] = s.u[m] + dt * 2.0 / h * (0.5 * (ps[m - 1] + ps[m]) - ps[m])
                    - (1.0 - w) * c * (s.u[m] - s.u[m - 1])
                    + dt * force[m];
            }
        }
        let u = a.solve(&rhs)?;

        // Volume: node 0 solves the boundary relation mu v_t = R theta_- - p_- v
        // with the trapezoidal rule.
        let d_old = self.divergence(&s.u, s.v[0]);
        let mut v = vec![0.0; n];
        let k = e.p_minus / mu;
        v[0] = (s.v[0] * (1.0 - 0.5 * k * dt) + dt * gas.r * e.theta_minus / mu) / (1.0 + 0.5 * k * dt);
        let d_new = self.divergence(&u, v[0]);
        for i in 1..n {
            v[i] = s.v[i] + 0.5 * dt * (d_new[i] + d_old[i]);
        }
        let dmid: Vec<f64> = d_new.iter().zip(&d_old).map(|(a, b)| 0.5 * (a + b)).collect();
        let mass_defect = (0..n)
            .map(|i| ((v[i] - s.v[i]) / dt - dmid[i]).abs())
            .fold(0.0, f64::max);
        if let Some(i) = v.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(NspError::Positivity {
                field: "v",
                index: i,
                value: v[i],
                t: t_new,
            });
        }

        // Energy.
        let vmid: Vec<f64> = v.iter().zip(&s.v).map(|(a, b)| 0.5 * (a + b)).collect();
        let cv = gas.cv();
        let kappa = gas.kappa;
        let mut a = Tridiagonal::zeros(n);
        let mut rhs = vec![0.0; n];
        a.pin(0, &mut rhs, e.theta_minus);
        for i in 1..m {
            let kp = kappa * dt / (h * h * vhalf(&vmid, i));
            let km = kappa * dt / (h * h * vhalf(&vmid, i - 1));
            let work = gas.r * dmid[i] / vmid[i] * dt;
            a.lower[i] = -w * km;
            a.upper[i] = -w * kp;
            a.diag[i] = cv + w * (kp + km + work);
            let cond = kp * (s.theta[i + 1] - s.theta[i]) - km * (s.theta[i] - s.theta[i - 1]);
            rhs[i] = cv * s.theta[i] - (1.0 - w) * work * s.theta[i]
                + dt * mu * dmid[i] * dmid[i] / vmid[i]
                + (1.0 - w) * cond;
        }
        match self.cfg.far_field_bc {
            FarFieldBc::Dirichlet => a.pin(m, &mut rhs, e.theta_plus),
            FarFieldBc::NeumannZero => {
                let c = 2.0 * kappa * dt / (h * h * vhalf(&vmid, m - 1));
                let work = gas.r * dmid[m] / vmid[m] * dt;
                a.lower[m] = -w * c;
                a.diag[m] = cv + w * (c + work);
                rhs[m] = cv * s.theta[m] - (1.0 - w) * work * s.theta[m]
                    + dt * mu * dmid[m] * dmid[m] / vmid[m]
                    - (1.0 - w) * c * (s.theta[m] - s.theta[m - 1]);
            }
        }
        if let Some(i) = a.diag.iter().position(|&d| !(d > 0.0)) {
            return Err(NspError::Positivity {
                field: "theta",
                index: i,
                value: a.diag[i],
                t: t_new,
            });
        }
        let theta = a.solve(&rhs)?;

        // Poisson.
        let sol = solve_poisson(
            &v,
            &self.model,
            (e.phi_minus, e.phi_plus),
            &self.grid,
            &s.phi,
            self.cfg.newton_tol,
            self.cfg.newton_max,
        )?;
        let next = FluidState {
            t: t_new,
            v,
            u,
            theta,
            phi: sol.phi,
        };
        next.check_positivity()?;
        Ok((
            next,
            StepReport {
                dt,
                poisson_iterations: sol.iterations,
                mass_defect,
            },
        ))
    }
}

/// Single step without history, with `dt = min(cfg.dt, CFL bound)`.
pub fn step(
    state: &FluidState,
    cfg: &SolverConfig,
    grid: &Grid,
    model: &ElectronDensityModel,
    gas: &GasParams,
    ends: &RiemannEndStates,
) -> Result<FluidState> {
    let mut stepper = Stepper::new(*grid, *cfg, *model, *gas, *ends)?;
    let dt = stepper.stable_dt(state);
    Ok(stepper.step(state, dt)?.0)
}
