//! The viscous contact wave `(v, u, theta, phi)(x, t)` built from a converged
//! self-similar profile.

use super::closure::{ClosurePoint, QuasineutralClosure};
use super::self_similar::{solve_self_similar, SelfSimilarNumerics, SelfSimilarProfile};
use super::{GasParams, RiemannEndStates};
use crate::electron_density::ElectronDensityModel;
use crate::error::{NspError, Result};
use crate::fd::derivative4;

/// The wave and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSample {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub phi: f64,
    pub dx_theta: f64,
    pub dx_v: f64,
    pub dx_u: f64,
    pub dx_phi: f64,
    pub dt_theta: f64,
    pub dxx_theta: f64,
    pub dxxx_theta: f64,
}

/// Immutable wave context; safe to share across threads.
#[derive(Debug, Clone)]
pub struct ContactWaveField {
    closure: QuasineutralClosure,
    profile: SelfSimilarProfile,
    v: Vec<f64>,
    phi: Vec<f64>,
    f_prime: Vec<f64>,
    g: Vec<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
    /// `Theta'^2 / f (f'/g)'` at the nodes.
    tail_integrand: Vec<f64>,
    /// `int_xi^{xi_max} tail_integrand`.
    tail: Vec<f64>,
    /// `int_0^xi Theta'^2`.
    weight: Vec<f64>,
}

/// Samples of a quintic Hermite interpolant and its first two derivatives.
struct Quintic {
    value: f64,
    d1: f64,
    d2: f64,
}

fn quintic(p: [f64; 2], m: [f64; 2], a: [f64; 2], h: f64, t: f64) -> Quintic {
    let (hm0, hm1) = (h * m[0], h * m[1]);
    let (ha0, ha1) = (h * h * a[0], h * h * a[1]);
    let dp = p[1] - p[0];
    let c0 = p[0];
    let c1 = hm0;
    let c2 = 0.5 * ha0;
    let c3 = 10.0 * dp - 6.0 * hm0 - 4.0 * hm1 - 1.5 * ha0 + 0.5 * ha1;
    let c4 = -15.0 * dp + 8.0 * hm0 + 7.0 * hm1 + 1.5 * ha0 - ha1;
    let c5 = 6.0 * dp - 3.0 * hm0 - 3.0 * hm1 - 0.5 * ha0 + 0.5 * ha1;
    let value = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
    let d1 = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
    let d2 = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
    Quintic {
        value,
        d1: d1 / h,
        d2: d2 / (h * h),
    }
}

fn cubic(p: [f64; 2], m: [f64; 2], h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    p[0] * (2.0 * t3 - 3.0 * t2 + 1.0)
        + h * m[0] * (t3 - 2.0 * t2 + t)
        + p[1] * (-2.0 * t3 + 3.0 * t2)
        + h * m[1] * (t3 - t2)
}

/// `Theta''` from the profile equation, given `Theta'`.
fn second_derivative(pt: &ClosurePoint, xi: f64, d1: f64, kappa: f64) -> f64 {
    pt.f_prime * d1 * d1 / pt.v - xi * pt.g * pt.v * d1 / (2.0 * kappa)
}

impl ContactWaveField {
    /// Solves the profile for `gas.kappa` and builds the wave.
    pub fn build(
        ends: RiemannEndStates,
        model: ElectronDensityModel,
        gas: GasParams,
        numerics: &SelfSimilarNumerics,
    ) -> Result<Self> {
        let closure = QuasineutralClosure::new(ends, model, gas)?;
        let profile = solve_self_similar(&closure, gas.kappa, numerics)?;
        Self::new(closure, profile)
    }

    pub fn new(closure: QuasineutralClosure, profile: SelfSimilarProfile) -> Result<Self> {
        if profile.kappa != closure.gas.kappa {
            return Err(NspError::InvalidInput(format!(
                "profile kappa {} differs from gas kappa {}",
                profile.kappa, closure.gas.kappa
            )));
        }
        let n = profile.theta.len();
        if n < 5 || profile.xi_grid.len() != n || profile.dtheta.len() != n {
            return Err(NspError::InvalidInput("inconsistent profile table".into()));
        }
        let h = profile.spacing();
        let mut pts: Vec<ClosurePoint> = Vec::with_capacity(n);
        for &th in &profile.theta {
            let pt = match pts.last() {
                Some(prev) => closure.point_from(th, prev.v)?,
                None => closure.point(th)?,
            };
            pts.push(pt);
        }
        let kappa = profile.kappa;
        let d2: Vec<f64> = (0..n)
            .map(|j| second_derivative(&pts[j], profile.xi_grid[j], profile.dtheta[j], kappa))
            .collect();
        let d3 = derivative4(&d2, h);
        let tail_integrand: Vec<f64> = (0..n)
            .map(|j| profile.dtheta[j].powi(2) / pts[j].v * pts[j].fprime_over_g_prime())
            .collect();
        let dtail = derivative4(&tail_integrand, h);
        let mut tail = vec![0.0; n];
        for j in (0..n - 1).rev() {
            let (a, b) = (tail_integrand[j], tail_integrand[j + 1]);
            let panel = 0.5 * h * (a + b) + h * h / 12.0 * (dtail[j] - dtail[j + 1]);
            tail[j] = tail[j + 1] + panel;
        }
        let mut weight = vec![0.0; n];
        for j in 0..n - 1 {
            let (a, b) = (profile.dtheta[j], profile.dtheta[j + 1]);
            let (da, db) = (2.0 * a * d2[j], 2.0 * b * d2[j + 1]);
            // The end correction can dominate in the far tail; the integrand is nonnegative.
            let panel = 0.5 * h * (a * a + b * b) + h * h / 12.0 * (da - db);
            weight[j + 1] = weight[j] + panel.max(0.0);
        }
        Ok(Self {
            weight,
            v: pts.iter().map(|p| p.v).collect(),
            phi: pts.iter().map(|p| p.phi).collect(),
            f_prime: pts.iter().map(|p| p.f_prime).collect(),
            g: pts.iter().map(|p| p.g).collect(),
            closure,
            profile,
            d2,
            d3,
            tail_integrand,
            tail,
        })
    }

    pub fn closure(&self) -> &QuasineutralClosure {
        &self.closure
    }

    pub fn ends(&self) -> &RiemannEndStates {
        &self.closure.ends
    }

    pub fn model(&self) -> &ElectronDensityModel {
        &self.closure.model
    }

    pub fn gas(&self) -> &GasParams {
        &self.closure.gas
    }

    pub fn profile(&self) -> &SelfSimilarProfile {
        &self.profile
    }

    /// `f(Theta)` at the profile nodes.
    pub fn v_nodes(&self) -> &[f64] {
        &self.v
    }

    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi
    }

    pub fn f_prime_nodes(&self) -> &[f64] {
        &self.f_prime
    }

    pub fn g_nodes(&self) -> &[f64] {
        &self.g
    }

    /// `Theta''` at the profile nodes.
    pub fn d2theta_nodes(&self) -> &[f64] {
        &self.d2
    }

    /// `Theta'''` at the profile nodes.
    pub fn d3theta_nodes(&self) -> &[f64] {
        &self.d3
    }

    /// `int_xi^{xi_max} Theta'^2 / f (f'/g)' dxi` at the profile nodes.
    pub fn tail_nodes(&self) -> &[f64] {
        &self.tail
    }

    /// `int_0^xi Theta'^2` by cubic Hermite interpolation of a cumulative table.
    pub(crate) fn weight_table_at(&self, xi: f64) -> f64 {
        let total = *self.weight.last().expect("nonempty table");
        if xi >= self.profile.xi_max() {
            return total;
        }
        let (j, t) = self.locate(xi);
        let d = &self.profile.dtheta;
        let (lo, hi) = (self.weight[j], self.weight[j + 1]);
        cubic([lo, hi], [d[j] * d[j], d[j + 1] * d[j + 1]], self.profile.spacing(), t).clamp(lo, hi)
    }

    /// Locates `xi` in the table: interval index and local coordinate in `[0, 1]`.
    fn locate(&self, xi: f64) -> (usize, f64) {
        let h = self.profile.spacing();
        let n = self.profile.theta.len();
        let s = (xi / h).max(0.0);
        let j = (s.floor() as usize).min(n - 2);
        (j, (s - j as f64).min(1.0))
    }

    /// `Theta` and its first three derivatives at `xi`, clamped beyond the table.
    pub fn profile_at(&self, xi: f64) -> [f64; 4] {
        let e = self.ends();
        if xi >= self.profile.xi_max() {
            return [e.theta_plus, 0.0, 0.0, 0.0];
        }
        let xi = xi.max(0.0);
        let (j, t) = self.locate(xi);
        let p = &self.profile;
        let q = quintic(
            [p.theta[j], p.theta[j + 1]],
            [p.dtheta[j], p.dtheta[j + 1]],
            [self.d2[j], self.d2[j + 1]],
            p.spacing(),
            t,
        );
        let d3 = self.d3[j] + t * (self.d3[j + 1] - self.d3[j]);
        let (lo, hi) = (e.theta_minus.min(e.theta_plus), e.theta_minus.max(e.theta_plus));
        [q.value.clamp(lo, hi), q.d1, q.d2, d3]
    }

    fn tail_at(&self, xi: f64) -> f64 {
        if xi >= self.profile.xi_max() {
            return 0.0;
        }
        let (j, t) = self.locate(xi.max(0.0));
        cubic(
            [self.tail[j], self.tail[j + 1]],
            [-self.tail_integrand[j], -self.tail_integrand[j + 1]],
            self.profile.spacing(),
            t,
        )
    }

    /// Closure data at `theta`, warm-started from the node table near `xi`.
    fn closure_at(&self, xi: f64, theta: f64) -> Result<ClosurePoint> {
        let e = self.ends();
        if theta == e.theta_plus {
            return self.closure.point_at(theta, e.v_plus);
        }
        if theta == e.theta_minus {
            return self.closure.point_at(theta, e.v_minus);
        }
        let (j, t) = self.locate(xi);
        let guess = self.v[j] + t * (self.v[j + 1] - self.v[j]);
        self.closure.point_from(theta, guess)
    }

    /// Evaluates the wave at `x >= 0`, `t >= 0`.
    pub fn evaluate_wave(&self, x: f64, t: f64) -> Result<WaveSample> {
        if !(x >= 0.0 && t >= 0.0) {
            return Err(NspError::InvalidInput(format!(
                "wave evaluation needs x, t >= 0, got ({x}, {t})"
            )));
        }
        let e = *self.ends();
        let s = (1.0 + t).sqrt();
        let xi = x / s;
        if xi >= self.profile.xi_max() || e.delta == 0.0 {
            return Ok(WaveSample {
                v: e.v_plus,
                u: e.u_plus,
                theta: e.theta_plus,
                phi: e.phi_plus,
                dx_theta: 0.0,
                dx_v: 0.0,
                dx_u: 0.0,
                dx_phi: 0.0,
                dt_theta: 0.0,
                dxx_theta: 0.0,
                dxxx_theta: 0.0,
            });
        }
        let [theta, d1, d2, d3] = self.profile_at(xi);
        let pt = self.closure_at(xi, theta)?;
        let (vlo, vhi) = (e.v_minus.min(e.v_plus), e.v_minus.max(e.v_plus));
        let (plo, phi_hi) = (e.phi_minus.min(e.phi_plus), e.phi_minus.max(e.phi_plus));
        let kappa = self.profile.kappa;
        let c = pt.f_prime / (pt.g * pt.v);
        let dx_theta = d1 / s;
        let dxx_theta = d2 / (s * s);
        let dx_v = pt.f_prime * dx_theta;
        Ok(WaveSample {
            v: pt.v.clamp(vlo, vhi),
            u: e.u_plus + kappa / s * (c * d1 + self.tail_at(xi)),
            theta,
            phi: pt.phi.clamp(plo, phi_hi),
            dx_theta,
            dx_v,
            dx_u: kappa * c * (dxx_theta - pt.f_prime * dx_theta * dx_theta / pt.v),
            dx_phi: pt.dphi_dv * dx_v,
            dt_theta: -xi * d1 / (2.0 * s * s),
            dxx_theta,
            dxxx_theta: d3 / (s * s * s),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave_profile::RightState;

    fn baseline(theta_minus: f64, n_nodes: usize) -> ContactWaveField {
        let model = ElectronDensityModel::boltzmann(1.0).unwrap();
        let gas = GasParams::default();
        let right = RightState {
            v_plus: 1.0,
            u_plus: 0.0,
            theta_plus: 1.0,
        };
        let ends = QuasineutralClosure::from_theta_minus(right, theta_minus, &model, &gas).unwrap();
        let num = SelfSimilarNumerics {
            n_nodes,
            ..Default::default()
        };
        ContactWaveField::build(ends, model, gas, &num).unwrap()
    }

    #[test]
    fn quintic_reproduces_quintic_polynomials() {
        let f = |x: f64| 1.0 - x + 0.5 * x.powi(3) + 0.2 * x.powi(5);
        let df = |x: f64| -1.0 + 1.5 * x * x + x.powi(4);
        let ddf = |x: f64| 3.0 * x + 4.0 * x.powi(3);
        let (a, b) = (0.3, 0.7);
        let h = b - a;
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let x = a + t * h;
            let q = quintic([f(a), f(b)], [df(a), df(b)], [ddf(a), ddf(b)], h, t);
            assert!((q.value - f(x)).abs() < 1e-14);
            assert!((q.d1 - df(x)).abs() < 1e-12);
            assert!((q.d2 - ddf(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_strength_wave_is_constant() {
        let w = baseline(1.0, 201);
        for &(x, t) in &[(0.0, 0.0), (1.0, 2.0), (30.0, 0.5)] {
            let s = w.evaluate_wave(x, t).unwrap();
            assert_eq!((s.v, s.u, s.phi, s.theta), (1.0, 0.0, 0.0, 1.0));
        }
    }

    #[test]
    fn mass_equation_holds() {
        let w = baseline(1.1, 2001);
        for &(x, t) in &[(0.3, 0.0), (1.0, 1.0), (2.5, 3.0), (4.0, 10.0)] {
            let dt = 1e-4;
            let vt = (w.evaluate_wave(x, t + dt).unwrap().v - w.evaluate_wave(x, (t - dt).max(0.0)).unwrap().v)
                / (t + dt - (t - dt).max(0.0));
            let ux = w.evaluate_wave(x, t).unwrap().dx_u;
            assert!((vt - ux).abs() < 1e-6, "({x},{t}): {vt} vs {ux}");
        }
    }

    #[test]
    fn velocity_derivative_matches_finite_difference() {
        let w = baseline(1.1, 2001);
        for &(x, t) in &[(0.5, 0.0), (1.5, 2.0), (3.0, 8.0)] {
            let dx = 1e-4;
            let fd = (w.evaluate_wave(x + dx, t).unwrap().u - w.evaluate_wave(x - dx, t).unwrap().u) / (2.0 * dx);
            let s = w.evaluate_wave(x, t).unwrap();
            assert!((fd - s.dx_u).abs() < 1e-7, "{fd} vs {}", s.dx_u);
            let fd_phi = (w.evaluate_wave(x + dx, t).unwrap().phi - w.evaluate_wave(x - dx, t).unwrap().phi) / (2.0 * dx);
            assert!((fd_phi - s.dx_phi).abs() < 1e-8);
        }
    }

    #[test]
    fn far_field_is_reached() {
        let w = baseline(1.1, 2001);
        for t in [0.0f64, 1.0, 9.0] {
            let x = 2.0 * 20.0 * (1.0 + t).sqrt();
            let s = w.evaluate_wave(x, t).unwrap();
            let e = w.ends();
            assert!((s.v - e.v_plus).abs() < 1e-8 && (s.u - e.u_plus).abs() < 1e-8);
            assert!((s.theta - e.theta_plus).abs() < 1e-8 && (s.phi - e.phi_plus).abs() < 1e-8);
        }
    }

    #[test]
    fn values_stay_between_end_states() {
        let w = baseline(1.1, 2001);
        let e = *w.ends();
        for k in 0..400 {
            let s = w.evaluate_wave(0.03 * k as f64, 2.0).unwrap();
            assert!(s.v >= e.v_plus.min(e.v_minus) && s.v <= e.v_plus.max(e.v_minus));
            assert!(s.phi >= e.phi_plus.min(e.phi_minus) && s.phi <= e.phi_plus.max(e.phi_minus));
        }
    }
}
