mod common;

use common::*;
use nsp_core::diagnostics::decay_fit;
use nsp_core::wave_profile::{
    solve_self_similar, ContactWaveField, GasParams, QuasineutralClosure, RightState,
    SelfSimilarNumerics,
};
use nsp_core::ElectronDensityModel;
use proptest::prelude::*;
use std::sync::OnceLock;

fn shared() -> &'static ContactWaveField {
    static WAVE: OnceLock<ContactWaveField> = OnceLock::new();
    WAVE.get_or_init(baseline)
}

#[test]
fn left_state_zero_strength() {
    let gas = GasParams::default();
    let e = QuasineutralClosure::solve_left_state(unit_right(), 1.0, &boltzmann(), &gas).unwrap();
    assert!((e.v_minus - 1.0).abs() < 1e-14 && (e.theta_minus - 1.0).abs() < 1e-14);
    assert!(e.delta < 1e-14);
    assert_eq!(e.u_minus, e.u_plus);
}

#[test]
fn left_state_against_bisection_oracle() {
    let gas = GasParams::default();
    let e = QuasineutralClosure::solve_left_state(unit_right(), 1.2, &boltzmann(), &gas).unwrap();
    // With p^phi(v) = 1/v the jump condition reads 1.2 = 1 + 1 - 1/v_-.
    let g = |v: f64| 1.2 - 1.0 + (1.0 / v - 1.0);
    let (mut a, mut b) = (0.5, 5.0);
    let mut evaluations = 0;
    while evaluations < 1_000_000 && b - a > 1e-15 {
        let m = 0.5 * (a + b);
        if g(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
        evaluations += 1;
    }
    assert!((e.v_minus - 0.5 * (a + b)).abs() <= 1e-10);
    assert!((e.theta_minus - 1.2 * e.v_minus).abs() <= 1e-12);
    e.validate(&boltzmann(), &gas).unwrap();
}

#[test]
fn left_state_generalized_substitution() {
    let gas = GasParams::default();
    let model = ElectronDensityModel::generalized(2.0, 1.0).unwrap();
    for p_minus in [0.9, 0.97, 1.05] {
        let e = QuasineutralClosure::solve_left_state(unit_right(), p_minus, &model, &gas).unwrap();
        let residual = gas.pressure(e.v_minus, e.theta_minus) - e.p_plus(&gas)
            - model.quasineutral_pressure(e.v_plus, 1.0).unwrap()
            + model.quasineutral_pressure(e.v_minus, 1.0).unwrap();
        assert!(residual.abs() <= 1e-10);
        assert!((e.phi_minus - model.inverse_density(1.0 / e.v_minus).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn closure_examples() {
    let w = shared();
    let c = w.closure();
    let e = *w.ends();
    assert_eq!(c.v_of_theta(e.theta_minus).unwrap(), e.v_minus);
    assert!((c.v_of_theta(e.theta_plus).unwrap() - e.v_plus).abs() <= 1e-9);
    let mid = 0.5 * (e.theta_minus + e.theta_plus);
    let exact = (mid + 1.0) / (e.p_minus + 1.0 / e.v_minus);
    assert!((c.v_of_theta(mid).unwrap() - exact).abs() <= 1e-10);

    let gas = GasParams::default();
    let unit = QuasineutralClosure::solve_left_state(unit_right(), 1.0, &boltzmann(), &gas).unwrap();
    let c1 = QuasineutralClosure::new(unit, boltzmann(), gas).unwrap();
    assert!((c1.f_prime(1.0).unwrap() - 0.5).abs() <= 1e-13);
}

#[test]
fn profile_zero_strength_is_constant() {
    let gas = GasParams::default();
    let e = QuasineutralClosure::from_theta_minus(unit_right(), 1.0, &boltzmann(), &gas).unwrap();
    let c = QuasineutralClosure::new(e, boltzmann(), gas).unwrap();
    let p = solve_self_similar(&c, 1.0, &SelfSimilarNumerics::default()).unwrap();
    assert!(p.theta.iter().all(|&t| t == e.theta_minus));
    assert_eq!(p.residual_norm, 0.0);
}

fn increasing_closure() -> QuasineutralClosure {
    // theta_- = 1, theta_+ = 1.1.
    let gas = GasParams::default();
    let right = RightState {
        v_plus: 1.0,
        u_plus: 0.0,
        theta_plus: 1.1,
    };
    let e = QuasineutralClosure::from_theta_minus(right, 1.0, &boltzmann(), &gas).unwrap();
    QuasineutralClosure::new(e, boltzmann(), gas).unwrap()
}

#[test]
fn increasing_profile_converges_and_is_strictly_increasing() {
    let c = increasing_closure();
    let num = SelfSimilarNumerics {
        correction_sweeps: 0,
        ..Default::default()
    };
    let p = solve_self_similar(&c, 1.0, &num).unwrap();
    assert!(p.residual_norm <= 1e-10, "{}", p.residual_norm);
    let tol = 1e-10 * 0.1;
    for (j, w) in p.theta.windows(2).enumerate() {
        assert!(w[1] >= w[0], "node {j}");
        if (1.1 - w[0]).abs() > tol {
            assert!(w[1] > w[0], "node {j}");
        }
    }
    assert_eq!(p.theta[0], 1.0);
    assert!((p.theta[p.theta.len() - 1] - 1.1).abs() <= 1e-8);
}

#[test]
fn profile_is_second_order_in_the_node_spacing() {
    let c = increasing_closure();
    let solve = |n: usize| {
        let num = SelfSimilarNumerics {
            n_nodes: n,
            correction_sweeps: 0,
            ..Default::default()
        };
        solve_self_similar(&c, 1.0, &num).unwrap().theta
    };
    let (a, b, r) = (solve(1001), solve(2001), solve(4001));
    let max_diff = |coarse: &[f64], fine: &[f64]| {
        let stride = (fine.len() - 1) / (coarse.len() - 1);
        coarse
            .iter()
            .enumerate()
            .map(|(j, x)| (x - fine[j * stride]).abs())
            .fold(0.0, f64::max)
    };
    let ratio = max_diff(&a, &b) / max_diff(&b, &r);
    assert!((ratio - 4.0).abs() <= 0.8, "ratio {ratio}");
}

#[test]
fn wave_examples() {
    let w = shared();
    let e = *w.ends();
    for t in [0.0f64, 1.0, 15.0] {
        let x = 2.0 * w.profile().xi_max() * (1.0 + t).sqrt();
        let s = w.evaluate_wave(x, t).unwrap();
        assert!((s.v - e.v_plus).abs() <= 1e-8 && (s.u - e.u_plus).abs() <= 1e-8);
        assert!((s.theta - e.theta_plus).abs() <= 1e-8 && (s.phi - e.phi_plus).abs() <= 1e-8);
    }
    let flat = wave_with(1.0, 1.0, 401);
    for &(x, t) in &[(0.0, 0.0), (0.5, 1.0), (3.0, 9.0)] {
        let s = flat.evaluate_wave(x, t).unwrap();
        assert_eq!((s.u, s.v, s.phi), (0.0, 1.0, 0.0));
    }
}

#[test]
fn residuals_vanish_for_constant_state_and_decay_at_the_stated_rates() {
    let flat = wave_with(1.0, 1.0, 401);
    let r = flat.wave_residuals(1.0).unwrap();
    assert!(r.r1 <= 1e-9 && r.r2 <= 1e-9 && r.r3 <= 1e-9);

    let w = shared();
    let ts = [1.0, 4.0, 16.0, 64.0];
    let rs: Vec<_> = ts.iter().map(|&t| w.wave_residuals(t).unwrap()).collect();
    let slope = |f: fn(&nsp_core::wave_profile::ResidualSup) -> f64| {
        decay_fit(&ts.iter().zip(&rs).map(|(&t, r)| (t, f(r))).collect::<Vec<_>>())
            .unwrap()
            .slope
    };
    assert!((slope(|r| r.r1) + 1.5).abs() <= 0.15);
    assert!((slope(|r| r.r2) + 2.0).abs() <= 0.2);
    assert!((slope(|r| r.r3) + 1.0).abs() <= 0.1);
}

#[test]
fn decay_integrals_zero_strength_and_rates() {
    let flat = wave_with(1.0, 1.0, 401);
    let d = flat.profile_decay_integrals(2.0);
    assert_eq!([d.i4, d.i2xx, d.i2xxx, d.ix_weighted], [0.0; 4]);
    let w = shared();
    let ts = [1.0, 4.0, 16.0, 64.0];
    let ds: Vec<_> = ts.iter().map(|&t| w.profile_decay_integrals(t)).collect();
    let slope = |f: fn(&nsp_core::wave_profile::DecayIntegrals) -> f64| {
        decay_fit(&ts.iter().zip(&ds).map(|(&t, d)| (t, f(d))).collect::<Vec<_>>())
            .unwrap()
            .slope
    };
    assert!((slope(|d| d.i4) + 1.5).abs() <= 0.15);
    assert!((slope(|d| d.i2xx) + 1.5).abs() <= 0.15);
    assert!((slope(|d| d.i2xxx) + 2.5).abs() <= 0.25);
}

#[test]
fn distance_to_sharp_wave() {
    let flat = wave_with(1.0, 1.0, 401);
    assert_eq!(flat.lp_distance_to_sharp(1.0, 1.0), 0.0);
    let w = shared();
    let ts = [1.0, 4.0, 16.0];
    let xs: Vec<f64> = ts.iter().map(|t| 1.0 + t).collect();
    let ys: Vec<f64> = ts.iter().map(|&t| w.lp_distance_to_sharp(2.0, t)).collect();
    assert!((loglog_slope(&xs, &ys) - 0.25).abs() <= 0.05);
}

#[test]
fn weight_examples() {
    let w = shared();
    assert_eq!(w.weight_w(0.0, 3.0), 0.0);
    let flat = wave_with(1.0, 1.0, 401);
    assert_eq!(flat.weight_w(5.0, 3.0), 0.0);
    let ts = [1.0, 4.0, 16.0];
    let xs: Vec<f64> = ts.iter().map(|t| 1.0 + t).collect();
    let ys: Vec<f64> = ts.iter().map(|&t| w.weight_sup(t)).collect();
    assert!((loglog_slope(&xs, &ys) + 0.5).abs() <= 0.1);
}

#[test]
fn gaussian_tail_fitted_at_one_persists() {
    let w = shared();
    let env = w.fit_gaussian_tail(1.0).unwrap();
    assert!(env.c1 > 0.0);
    for t in [4.0, 16.0] {
        assert!(w.tail_envelope_ratio(&env, t).unwrap() <= 1.0 + 1e-9);
    }
}

#[test]
fn node_invariants_hold() {
    let w = shared();
    let e = *w.ends();
    let model = *w.model();
    let gas = *w.gas();
    let p = w.profile();
    for j in 0..p.theta.len() {
        let th = p.theta[j];
        let v = w.v_nodes()[j];
        let compat = gas.r * th / v + model.quasineutral_pressure(v, e.v_minus).unwrap() - e.p_minus;
        assert!(compat.abs() <= 1e-10, "node {j}: {compat}");
        assert!(w.g_nodes()[j] > 0.0 && w.f_prime_nodes()[j] > 0.0);
        assert!(th >= e.theta_plus.min(e.theta_minus) && th <= e.theta_plus.max(e.theta_minus));
    }
    for (j, pair) in p.theta.windows(2).enumerate() {
        assert!(pair[1] <= pair[0], "node {j}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_prime_matches_finite_differences(s in 0.0f64..1.0) {
        let w = shared();
        let e = *w.ends();
        let theta = e.theta_plus + s * (e.theta_minus - e.theta_plus);
        let c = w.closure();
        let h = 1e-6;
        let fd = (c.v_of_theta(theta + h).unwrap() - c.v_of_theta(theta - h).unwrap()) / (2.0 * h);
        let fp = c.f_prime(theta).unwrap();
        prop_assert!(((fp - fd) / fp).abs() <= 1e-6);
    }

    #[test]
    fn mass_equation_of_the_wave(x in 0.01f64..12.0, t in 0.01f64..30.0) {
        let w = shared();
        let dt = 1e-4 * (1.0 + t);
        let vt = (w.evaluate_wave(x, t + dt).unwrap().v - w.evaluate_wave(x, t - dt.min(t)).unwrap().v)
            / (dt + dt.min(t));
        let ux = w.evaluate_wave(x, t).unwrap().dx_u;
        prop_assert!((vt - ux).abs() <= 1e-6, "{} vs {}", vt, ux);
    }

    #[test]
    fn evaluations_stay_between_end_states(x in 0.0f64..60.0, t in 0.0f64..50.0) {
        let w = shared();
        let e = *w.ends();
        let s = w.evaluate_wave(x, t).unwrap();
        prop_assert!(s.v >= e.v_minus.min(e.v_plus) && s.v <= e.v_minus.max(e.v_plus));
        prop_assert!(s.phi >= e.phi_minus.min(e.phi_plus) && s.phi <= e.phi_minus.max(e.phi_plus));
        prop_assert!(s.theta >= e.theta_minus.min(e.theta_plus) && s.theta <= e.theta_minus.max(e.theta_plus));
    }
}
