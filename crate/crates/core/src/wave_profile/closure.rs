//! Quasineutral pressure balance `R theta / v + p^phi(v) = const` and the
//! implicit map `v = f(theta)` it defines.

use super::{GasParams, RiemannEndStates, RightState};
use crate::electron_density::ElectronDensityModel;
use crate::error::{NspError, Result};

const MAX_EXPANSIONS: usize = 80;
const MAX_NEWTON: usize = 100;

/// Finds the root of a strictly decreasing function of a positive variable,
/// starting from `guess`. `f` returns the value and its derivative.
fn decreasing_root<F>(mut f: F, guess: f64, context: &str) -> Result<f64>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let fail = || NspError::BracketFailure {
        context: context.to_string(),
    };
    let x0 = guess;
    let (f0, d0) = f(x0)?;
    if f0 == 0.0 {
        return Ok(x0);
    }
    // Bracket search in the direction of the root, starting at the Newton distance.
    let mut dist = if d0 < 0.0 { (f0 / d0).abs() * 1.5 } else { 0.1 * x0 };
    dist = dist.max(1e-12 * x0);
    let mut anchor = (x0, f0);
    let mut found = None;
    for _ in 0..MAX_EXPANSIONS {
        let xt = if f0 > 0.0 {
            anchor.0 + dist
        } else if anchor.0 - dist > 0.0 {
            anchor.0 - dist
        } else {
            0.5 * anchor.0
        };
        let ft = f(xt).map_err(|_| fail())?.0;
        if (ft > 0.0) != (f0 > 0.0) || ft == 0.0 {
            found = Some((xt, ft));
            break;
        }
        anchor = (xt, ft);
        dist *= 2.0;
    }
    let (xt, ft) = found.ok_or_else(fail)?;
    let (mut lo, mut hi, flo, fhi) = if f0 > 0.0 {
        (anchor.0, xt, anchor.1, ft)
    } else {
        (xt, anchor.0, ft, anchor.1)
    };
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    // Safeguarded Newton inside [lo, hi] with f(lo) > 0 > f(hi).
    let mut x = if f0 > 0.0 { lo } else { hi };
    let (mut fx, mut dx) = f(x)?;
    for _ in 0..MAX_NEWTON {
        if fx == 0.0 {
            return Ok(x);
        }
        let mut next = if dx < 0.0 { x - fx / dx } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        let r = f(x)?;
        fx = r.0;
        dx = r.1;
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if step <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            return Ok(x);
        }
    }
    Err(NspError::NewtonDivergence {
        context: context.to_string(),
        iterations: MAX_NEWTON,
        residual: fx.abs(),
    })
}

/// Evaluation of the closure and its derivatives at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosurePoint {
    pub theta: f64,
    /// `f(theta)`.
    pub v: f64,
    pub phi: f64,
    /// `R theta / v`.
    pub p: f64,
    pub rho_e_prime: f64,
    /// `d phi / d v = -1 / (v^2 rho_e'(phi))`.
    pub dphi_dv: f64,
    pub f_prime: f64,
    pub f_second: f64,
    pub g: f64,
    pub g_prime: f64,
}

impl ClosurePoint {
    /// `(f'/g)'` with respect to theta.
    pub fn fprime_over_g_prime(&self) -> f64 {
        (self.f_second * self.g - self.f_prime * self.g_prime) / (self.g * self.g)
    }
}

/// End states together with the density model and gas constants: everything
/// needed to evaluate `f`, `f'` and `g` along the profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasineutralClosure {
    pub ends: RiemannEndStates,
    pub model: ElectronDensityModel,
    pub gas: GasParams,
}

/// Solves `R theta / v + p^phi(v; v_ref) = p_ref` for `v`.
fn solve_balance(
    model: &ElectronDensityModel,
    gas: &GasParams,
    theta: f64,
    v_ref: f64,
    p_ref: f64,
    guess: f64,
    context: &str,
) -> Result<f64> {
    decreasing_root(
        |v| {
            let value = gas.r * theta / v + model.quasineutral_pressure(v, v_ref)? - p_ref;
            let slope = -gas.r * theta / (v * v) + model.pressure_integrand(v)?;
            Ok((value, slope))
        },
        guess,
        context,
    )
}

fn finish_ends(
    right: RightState,
    v_minus: f64,
    theta_minus: f64,
    p_minus: f64,
    model: &ElectronDensityModel,
) -> Result<RiemannEndStates> {
    Ok(RiemannEndStates {
        v_minus,
        v_plus: right.v_plus,
        u_minus: right.u_plus,
        u_plus: right.u_plus,
        theta_minus,
        theta_plus: right.theta_plus,
        phi_minus: model.inverse_density(1.0 / v_minus)?,
        phi_plus: model.inverse_density(1.0 / right.v_plus)?,
        p_minus,
        delta: (right.theta_plus - theta_minus).abs(),
    })
}

fn check_right(right: &RightState, model: &ElectronDensityModel) -> Result<()> {
    if !(right.v_plus > 0.0 && right.theta_plus > 0.0) {
        return Err(NspError::InvalidInput(format!(
            "v_plus and theta_plus must be positive, got {} and {}",
            right.v_plus, right.theta_plus
        )));
    }
    model.inverse_density(1.0 / right.v_plus)?;
    Ok(())
}

impl QuasineutralClosure {
    pub fn new(ends: RiemannEndStates, model: ElectronDensityModel, gas: GasParams) -> Result<Self> {
        gas.validate()?;
        ends.validate(&model, &gas)?;
        Ok(Self { ends, model, gas })
    }

    /// Left state compatible with the right state and boundary pressure `p_minus`.
    ///
    /// `v_minus` is the root of `p_minus - p_plus + p^phi(v; v_plus)`, which is
    /// strictly decreasing in `v` because `rho_e' < 0`.
    pub fn solve_left_state(
        right: RightState,
        p_minus: f64,
        model: &ElectronDensityModel,
        gas: &GasParams,
    ) -> Result<RiemannEndStates> {
        gas.validate()?;
        check_right(&right, model)?;
        if !(p_minus > 0.0) {
            return Err(NspError::InvalidInput(format!("p_minus must be positive, got {p_minus}")));
        }
        let p_plus = gas.pressure(right.v_plus, right.theta_plus);
        let g = |v: f64| -> Result<(f64, f64)> {
            Ok((
                p_minus - p_plus + model.quasineutral_pressure(v, right.v_plus)?,
                model.pressure_integrand(v)?,
            ))
        };
        let v_minus = match decreasing_root(g, right.v_plus, "left specific volume") {
            Ok(v) => v,
            Err(NspError::BracketFailure { .. }) => {
                // Report the range of p_minus reachable inside the probed volumes.
                let (rho_lo, _) = model.density_range();
                let v_big = if rho_lo > 0.0 { 0.999 / rho_lo } else { 1e6 * right.v_plus }
                    .min(1e6 * right.v_plus);
                let hi = p_plus - model.quasineutral_pressure(v_big, right.v_plus).unwrap_or(f64::NAN);
                return Err(NspError::NoBracket {
                    p_minus,
                    lo: 0.0,
                    hi,
                });
            }
            Err(e) => return Err(e),
        };
        let theta_minus = p_minus * v_minus / gas.r;
        finish_ends(right, v_minus, theta_minus, p_minus, model)
    }

    /// End states for a prescribed left temperature; `p_minus` follows.
    pub fn from_theta_minus(
        right: RightState,
        theta_minus: f64,
        model: &ElectronDensityModel,
        gas: &GasParams,
    ) -> Result<RiemannEndStates> {
        gas.validate()?;
        check_right(&right, model)?;
        if !(theta_minus > 0.0) {
            return Err(NspError::InvalidInput(format!(
                "theta_minus must be positive, got {theta_minus}"
            )));
        }
        let p_plus = gas.pressure(right.v_plus, right.theta_plus);
        let v_minus = solve_balance(
            model,
            gas,
            theta_minus,
            right.v_plus,
            p_plus,
            right.v_plus * theta_minus / right.theta_plus,
            "left state from temperature",
        )?;
        let p_minus = gas.pressure(v_minus, theta_minus);
        finish_ends(right, v_minus, theta_minus, p_minus, model)
    }

    fn check_theta(&self, theta: f64) -> Result<()> {
        let lo = self.ends.theta_minus.min(self.ends.theta_plus);
        let hi = self.ends.theta_minus.max(self.ends.theta_plus);
        let margin = (0.1 * (hi - lo)).max(1e-3 * lo);
        if theta >= lo - margin && theta <= hi + margin {
            Ok(())
        } else {
            Err(NspError::Domain {
                what: "theta",
                value: theta,
                lo: lo - margin,
                hi: hi + margin,
            })
        }
    }

    fn linear_guess(&self, theta: f64) -> f64 {
        let e = &self.ends;
        if e.delta == 0.0 {
            e.v_minus
        } else {
            e.v_minus + (e.v_plus - e.v_minus) * (theta - e.theta_minus) / (e.theta_plus - e.theta_minus)
        }
    }

    /// `f(theta)`: the volume satisfying `R theta / v + p^phi(v; v_-) = p_-`.
    pub fn v_of_theta(&self, theta: f64) -> Result<f64> {
        self.v_of_theta_from(theta, self.linear_guess(theta))
    }

    /// As [`Self::v_of_theta`] with an explicit starting volume.
    pub fn v_of_theta_from(&self, theta: f64, guess: f64) -> Result<f64> {
        self.check_theta(theta)?;
        if theta == self.ends.theta_minus {
            return Ok(self.ends.v_minus);
        }
        let guess = if guess > 0.0 { guess } else { self.linear_guess(theta) };
        solve_balance(
            &self.model,
            &self.gas,
            theta,
            self.ends.v_minus,
            self.ends.p_minus,
            guess,
            "v = f(theta)",
        )
    }

    /// `f'(theta) = R / (p - 1/(v^2 rho_e'(phi)))`.
    pub fn f_prime(&self, theta: f64) -> Result<f64> {
        Ok(self.point(theta)?.f_prime)
    }

    pub fn point(&self, theta: f64) -> Result<ClosurePoint> {
        self.point_from(theta, self.linear_guess(theta))
    }

    pub fn point_from(&self, theta: f64, guess: f64) -> Result<ClosurePoint> {
        let v = self.v_of_theta_from(theta, guess)?;
        self.point_at(theta, v)
    }

    /// Derived quantities at a known `(theta, v = f(theta))` pair.
    pub fn point_at(&self, theta: f64, v: f64) -> Result<ClosurePoint> {
        let gas = &self.gas;
        let phi = self.model.inverse_density(1.0 / v)?;
        let (d1, d2) = self.model.density_derivatives(phi)?;
        let p = gas.r * theta / v;
        let h = -1.0 / (v * v * d1);
        let f_prime = gas.r / (p + h);
        let dp_dtheta = (gas.r - p * f_prime) / v;
        let dh_dv = 2.0 / (v * v * v * d1) + d2 * h / (v * v * d1 * d1);
        let denom = p + h;
        let f_second = -gas.r * (dp_dtheta + dh_dv * f_prime) / (denom * denom);
        let g = gas.cv() + p * f_prime;
        let g_prime = dp_dtheta * f_prime + p * f_second;
        Ok(ClosurePoint {
            theta,
            v,
            phi,
            p,
            rho_e_prime: d1,
            dphi_dv: h,
            f_prime,
            f_second,
            g,
            g_prime,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boltzmann() -> ElectronDensityModel {
        ElectronDensityModel::boltzmann(1.0).unwrap()
    }

    fn unit_right() -> RightState {
        RightState {
            v_plus: 1.0,
            u_plus: 0.0,
            theta_plus: 1.0,
        }
    }

    #[test]
    fn zero_strength_left_state() {
        let gas = GasParams::default();
        let e = QuasineutralClosure::solve_left_state(unit_right(), 1.0, &boltzmann(), &gas).unwrap();
        assert!((e.v_minus - 1.0).abs() < 1e-14);
        assert!(e.delta < 1e-13);
    }

    #[test]
    fn boltzmann_left_state_matches_bisection() {
        let gas = GasParams::default();
        let e = QuasineutralClosure::solve_left_state(unit_right(), 1.2, &boltzmann(), &gas).unwrap();
        // Closed form p^phi(v) = 1/v - 1/v_plus: 1.2 = 2 - 1/v_minus.
        let g = |v: f64| 1.2 - 1.0 + (1.0 / v - 1.0);
        let (mut a, mut b) = (1.0, 2.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((e.v_minus - 0.5 * (a + b)).abs() < 1e-10);
        assert!((e.theta_minus - 1.5).abs() < 1e-10);
        e.validate(&boltzmann(), &gas).unwrap();
    }

    #[test]
    fn generalized_left_state_satisfies_jump_condition() {
        let gas = GasParams::default();
        let model = ElectronDensityModel::generalized(2.0, 1.0).unwrap();
        let e = QuasineutralClosure::solve_left_state(unit_right(), 0.93, &model, &gas).unwrap();
        let lhs = gas.pressure(e.v_minus, e.theta_minus);
        let rhs = e.p_plus(&gas) + model.quasineutral_pressure(e.v_plus, 1.0).unwrap()
            - model.quasineutral_pressure(e.v_minus, 1.0).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10);
        e.validate(&model, &gas).unwrap();
    }

    #[test]
    fn unreachable_boundary_pressure_reports_interval() {
        let gas = GasParams::default();
        // For the Boltzmann relation p_minus must stay below p_plus + A_e / v_plus = 2.
        let err = QuasineutralClosure::solve_left_state(unit_right(), 2.5, &boltzmann(), &gas).unwrap_err();
        match err {
            NspError::NoBracket { hi, .. } => assert!((hi - 2.0).abs() < 1e-3, "{hi}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn left_state_from_temperature_roundtrips() {
        let gas = GasParams::default();
        let e = QuasineutralClosure::from_theta_minus(unit_right(), 1.1, &boltzmann(), &gas).unwrap();
        let back = QuasineutralClosure::solve_left_state(unit_right(), e.p_minus, &boltzmann(), &gas).unwrap();
        assert!((back.theta_minus - 1.1).abs() < 1e-12);
        assert!((back.v_minus - e.v_minus).abs() < 1e-12);
    }

    fn baseline_closure() -> QuasineutralClosure {
        let gas = GasParams::default();
        let e = QuasineutralClosure::solve_left_state(unit_right(), 1.2, &boltzmann(), &gas).unwrap();
        QuasineutralClosure::new(e, boltzmann(), gas).unwrap()
    }

    #[test]
    fn f_reproduces_end_states() {
        let c = baseline_closure();
        assert_eq!(c.v_of_theta(c.ends.theta_minus).unwrap(), c.ends.v_minus);
        assert!((c.v_of_theta(c.ends.theta_plus).unwrap() - c.ends.v_plus).abs() < 1e-9);
    }

    #[test]
    fn f_matches_boltzmann_closed_form() {
        let c = baseline_closure();
        let e = c.ends;
        let theta = 0.5 * (e.theta_minus + e.theta_plus);
        // R theta / v + 1/v - 1/v_- = p_-  =>  v = (R theta + 1) / (p_- + 1/v_-).
        let exact = (theta + 1.0) / (e.p_minus + 1.0 / e.v_minus);
        assert!((c.v_of_theta(theta).unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn f_prime_closed_form_at_unit_state() {
        let gas = GasParams::default();
        let e = QuasineutralClosure::solve_left_state(unit_right(), 1.0, &boltzmann(), &gas).unwrap();
        let c = QuasineutralClosure { ends: e, model: boltzmann(), gas };
        assert!((c.v_of_theta(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((c.f_prime(1.0).unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for model in [boltzmann(), ElectronDensityModel::generalized(2.5, 0.8).unwrap()] {
            let gas = GasParams::default();
            let e = QuasineutralClosure::from_theta_minus(unit_right(), 1.15, &model, &gas).unwrap();
            let c = QuasineutralClosure::new(e, model, gas).unwrap();
            for k in 0..=10 {
                let theta = 1.0 + 0.015 * k as f64;
                let h = 1e-6;
                let pt = c.point(theta).unwrap();
                assert!(pt.f_prime > 0.0 && pt.g > 0.0);
                let fd = (c.v_of_theta(theta + h).unwrap() - c.v_of_theta(theta - h).unwrap()) / (2.0 * h);
                assert!(((pt.f_prime - fd) / pt.f_prime).abs() < 1e-6);
                let h = 1e-5;
                let (a, b) = (c.point(theta + h).unwrap(), c.point(theta - h).unwrap());
                let fpp = (a.f_prime - b.f_prime) / (2.0 * h);
                let gp = (a.g - b.g) / (2.0 * h);
                assert!((pt.f_second - fpp).abs() < 1e-7 * (1.0 + fpp.abs()));
                assert!((pt.g_prime - gp).abs() < 1e-7 * (1.0 + gp.abs()));
                let residual = gas.r * theta / pt.v
                    + model.quasineutral_pressure(pt.v, e.v_minus).unwrap()
                    - e.p_minus;
                assert!(residual.abs() < 1e-11);
            }
        }
    }

    #[test]
    fn theta_outside_margin_is_rejected() {
        let c = baseline_closure();
        assert!(c.v_of_theta(3.0).is_err());
    }
}
