//! Quantities derived from the wave: residuals against the full system,
//! derivative integrals, distance to the sharp contact and the weight `w`.

use super::field::ContactWaveField;
use crate::error::Result;
use crate::fd::{central_d1, forward_d1};
use crate::quadrature::simpson_uniform;

/// Probe points used by [`ContactWaveField::wave_residuals`].
const RESIDUAL_PROBES: usize = 1500;
/// Finite-difference steps relative to `sqrt(1 + t)` (space) and `1 + t` (time).
const PROBE_STEP: f64 = 5e-3;

/// Sup norms of the momentum, energy and Poisson residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSup {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
}

/// `int theta_x^4`, `int theta_xx^2`, `int theta_xxx^2` and
/// `int x (theta_x^2 + |theta_xx|)` at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayIntegrals {
    pub i4: f64,
    pub i2xx: f64,
    pub i2xxx: f64,
    pub ix_weighted: f64,
}

/// Envelope `|theta - theta_+| <= c * delta * exp(-c1 x^2 / (1 + t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEnvelope {
    pub c: f64,
    pub c1: f64,
}

impl ContactWaveField {
    /// Substitutes the wave into the momentum, energy and Poisson equations
    /// on a probe grid uniform in `xi` and returns the sup norms.
    pub fn wave_residuals(&self, t: f64) -> Result<ResidualSup> {
        let gas = *self.gas();
        let model = *self.model();
        let kappa = self.profile().kappa;
        let s = (1.0 + t).sqrt();
        let dx = PROBE_STEP * s;
        let dt = PROBE_STEP * (1.0 + t);
        let xi_lo = 2.5 * PROBE_STEP;
        let xi_hi = 0.75 * self.profile().xi_max();
        let mut out = ResidualSup { r1: 0.0, r2: 0.0, r3: 0.0 };
        for k in 0..RESIDUAL_PROBES {
            let xi = xi_lo + (xi_hi - xi_lo) * k as f64 / (RESIDUAL_PROBES - 1) as f64;
            let x = xi * s;
            let w = self.evaluate_wave(x, t)?;
            let around = |k: i32| self.evaluate_wave(x + k as f64 * dx, t);
            let mut ux_over_v = [0.0; 5];
            let mut phix_over_v = [0.0; 5];
            for (i, slot) in (-2..=2).enumerate() {
                let n = around(slot)?;
                ux_over_v[i] = n.dx_u / n.v;
                phix_over_v[i] = n.dx_phi / n.v;
            }
            let u_t = if t >= 2.0 * dt {
                let mut u = [0.0; 5];
                for (i, slot) in (-2..=2).enumerate() {
                    u[i] = self.evaluate_wave(x, t + slot as f64 * dt)?.u;
                }
                central_d1(u, dt)
            } else {
                let mut u = [0.0; 5];
                for (i, slot) in (0..5).enumerate() {
                    u[i] = self.evaluate_wave(x, t + slot as f64 * dt)?.u;
                }
                forward_d1(u, dt)
            };
            let p = gas.pressure(w.v, w.theta);
            let p_x = gas.r * w.dx_theta / w.v - p * w.dx_v / w.v;
            let r1 = u_t + p_x - w.dx_phi / w.v - gas.mu * central_d1(ux_over_v, dx);
            let conduction = w.dxx_theta / w.v - w.dx_theta * w.dx_v / (w.v * w.v);
            let r2 = gas.cv() * w.dt_theta + p * w.dx_u - gas.mu * w.dx_u * w.dx_u / w.v - kappa * conduction;
            let r3 = central_d1(phix_over_v, dx) - (1.0 - w.v * model.density(w.phi)?);
            out.r1 = out.r1.max(r1.abs());
            out.r2 = out.r2.max(r2.abs());
            out.r3 = out.r3.max(r3.abs());
        }
        Ok(out)
    }

    /// Derivative integrals of `theta` over the half-line at time `t`.
    ///
    /// Computed in the similarity variable on the node table and mapped back:
    /// `int theta_x^4 dx = (1+t)^{-3/2} int Theta'^4 dxi` and so on.
    pub fn profile_decay_integrals(&self, t: f64) -> DecayIntegrals {
        let p = self.profile();
        let h = p.spacing();
        let d1 = &p.dtheta;
        let d2 = self.d2theta_nodes();
        let d3 = self.d3theta_nodes();
        let s = (1.0 + t).sqrt();
        let quad = |f: &dyn Fn(usize) -> f64| {
            let vals: Vec<f64> = (0..p.xi_grid.len()).map(f).collect();
            simpson_uniform(&vals, h)
        };
        DecayIntegrals {
            i4: quad(&|j| d1[j].powi(4)) / s.powi(3),
            i2xx: quad(&|j| d2[j] * d2[j]) / s.powi(3),
            i2xxx: quad(&|j| d3[j] * d3[j]) / s.powi(5),
            ix_weighted: quad(&|j| p.xi_grid[j] * (d1[j] * d1[j] + d2[j].abs())),
        }
    }

    /// `( sum over v, u, theta, phi of int_0^inf |wave - right state|^p dx )^{1/p}`,
    /// the `L^p` distance to the sharp contact located at the boundary.
    pub fn lp_distance_to_sharp(&self, p: f64, t: f64) -> f64 {
        let e = *self.ends();
        let prof = self.profile();
        let s = (1.0 + t).sqrt();
        let kappa = prof.kappa;
        let v = self.v_nodes();
        let phi = self.phi_nodes();
        let fp = self.f_prime_nodes();
        let g = self.g_nodes();
        let tail = self.tail_nodes();
        let vals: Vec<f64> = (0..prof.xi_grid.len())
            .map(|j| {
                let du = kappa / s * (fp[j] / (g[j] * v[j]) * prof.dtheta[j] + tail[j]);
                (v[j] - e.v_plus).abs().powf(p)
                    + du.abs().powf(p)
                    + (prof.theta[j] - e.theta_plus).abs().powf(p)
                    + (phi[j] - e.phi_plus).abs().powf(p)
            })
            .collect();
        (s * simpson_uniform(&vals, prof.spacing())).powf(1.0 / p)
    }

    /// `w(x, t) = int_0^x theta_x^2 dy`.
    pub fn weight_w(&self, x: f64, t: f64) -> f64 {
        let s = (1.0 + t).sqrt();
        self.weight_table_at((x / s).max(0.0)) / s
    }

    /// `sup_x w(x, t)`; `w` is nondecreasing in `x`.
    pub fn weight_sup(&self, t: f64) -> f64 {
        self.weight_table_at(self.profile().xi_max()) / (1.0 + t).sqrt()
    }

    /// Fits the Gaussian tail envelope at time `t`.
    ///
    /// `c1` is 0.9 times the least-squares Gaussian rate of the tail (where
    /// `|theta - theta_+| / delta` lies in `[1e-10, 1e-2]`); `c` is the smallest
    /// constant making the envelope hold on the sample.
    pub fn fit_gaussian_tail(&self, t: f64) -> Option<TailEnvelope> {
        let e = self.ends();
        if e.delta == 0.0 {
            return None;
        }
        let s2 = 1.0 + t;
        let xs = self.tail_sample_points(t);
        let mut pts = Vec::new();
        for &x in &xs {
            let th = self.evaluate_wave(x, t).ok()?.theta;
            pts.push((x, (th - e.theta_plus).abs() / e.delta));
        }
        let fit: Vec<(f64, f64)> = pts
            .iter()
            .filter(|(_, r)| (1e-10..=1e-2).contains(r))
            .map(|&(x, r)| (x * x / s2, r.ln()))
            .collect();
        if fit.len() < 4 {
            return None;
        }
        let n = fit.len() as f64;
        let (mx, my) = fit.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
        let (sxy, sxx) = fit
            .iter()
            .fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx).powi(2)));
        let c1 = -0.9 * sxy / sxx;
        if !(c1 > 0.0) {
            return None;
        }
        let c = pts
            .iter()
            .filter(|(_, r)| *r > 1e-13)
            .map(|&(x, r)| r * (c1 * x * x / s2).exp())
            .fold(0.0, f64::max);
        Some(TailEnvelope { c, c1 })
    }

    /// Largest ratio `|theta - theta_+| / (c delta exp(-c1 x^2/(1+t)))` over the
    /// sample at time `t`, ignoring differences at rounding level.
    pub fn tail_envelope_ratio(&self, env: &TailEnvelope, t: f64) -> Result<f64> {
        let e = *self.ends();
        let floor = 8.0 * f64::EPSILON * e.theta_plus.abs();
        let mut worst: f64 = 0.0;
        for x in self.tail_sample_points(t) {
            let diff = (self.evaluate_wave(x, t)?.theta - e.theta_plus).abs();
            if diff <= floor {
                continue;
            }
            let bound = env.c * e.delta * (-env.c1 * x * x / (1.0 + t)).exp();
            worst = worst.max(diff / bound);
        }
        Ok(worst)
    }

    fn tail_sample_points(&self, t: f64) -> Vec<f64> {
        let s = (1.0 + t).sqrt();
        let n = 2000;
        let xi_max = self.profile().xi_max();
        (0..=n).map(|k| xi_max * s * k as f64 / n as f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::closure::QuasineutralClosure;
    use super::super::self_similar::SelfSimilarNumerics;
    use super::super::{GasParams, RightState};
    use super::*;
    use crate::electron_density::ElectronDensityModel;
    use crate::quadrature::integrate;

    fn wave(theta_minus: f64) -> ContactWaveField {
        let model = ElectronDensityModel::boltzmann(1.0).unwrap();
        let gas = GasParams::default();
        let right = RightState {
            v_plus: 1.0,
            u_plus: 0.0,
            theta_plus: 1.0,
        };
        let ends = QuasineutralClosure::from_theta_minus(right, theta_minus, &model, &gas).unwrap();
        let num = SelfSimilarNumerics {
            n_nodes: 2001,
            ..Default::default()
        };
        ContactWaveField::build(ends, model, gas, &num).unwrap()
    }

    #[test]
    fn constant_state_has_no_residual() {
        let w = wave(1.0);
        let r = w.wave_residuals(1.0).unwrap();
        assert!(r.r1 <= 1e-9 && r.r2 <= 1e-9 && r.r3 <= 1e-9);
        let d = w.profile_decay_integrals(1.0);
        assert_eq!((d.i4, d.i2xx, d.i2xxx, d.ix_weighted), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(w.lp_distance_to_sharp(1.0, 1.0), 0.0);
        assert_eq!(w.weight_sup(1.0), 0.0);
    }

    #[test]
    fn weight_matches_adaptive_quadrature() {
        let w = wave(1.1);
        for &(x, t) in &[(0.0, 1.0), (0.7, 1.0), (2.0, 4.0), (9.0, 16.0)] {
            let oracle = integrate(|y| Ok(w.evaluate_wave(y, t)?.dx_theta.powi(2)), 0.0, x, 1e-13)
                .unwrap()
                .value;
            assert!((w.weight_w(x, t) - oracle).abs() < 1e-10, "({x},{t})");
        }
    }

    #[test]
    fn decay_integrals_match_pointwise_quadrature() {
        let w = wave(1.1);
        let t = 3.0;
        let d = w.profile_decay_integrals(t);
        let x_end = 20.0 * 2.0;
        let i4 = integrate(|y| Ok(w.evaluate_wave(y, t)?.dx_theta.powi(4)), 0.0, x_end, 1e-15).unwrap();
        let i2 = integrate(|y| Ok(w.evaluate_wave(y, t)?.dxx_theta.powi(2)), 0.0, x_end, 1e-14).unwrap();
        assert!((d.i4 - i4.value).abs() < 1e-9 * d.i4.max(1e-12) + 1e-14);
        assert!((d.i2xx - i2.value).abs() < 1e-7 * d.i2xx);
    }

    #[test]
    fn residuals_are_self_similar() {
        let w = wave(1.1);
        let a = w.wave_residuals(3.0).unwrap();
        let b = w.wave_residuals(15.0).unwrap();
        // s doubles from 2 to 4. The energy residual is a small difference of
        // O(1 / (1+t)) terms, so the profile's discretization error shows up there.
        assert!((a.r1 / b.r1 / 8.0 - 1.0).abs() < 1e-3);
        assert!((a.r2 / b.r2 / 16.0 - 1.0).abs() < 1e-2);
        assert!((a.r3 / b.r3 / 4.0 - 1.0).abs() < 1e-3);
    }
}
