mod common;

use common::*;
use nsp_core::diagnostics::{
    boundary_identity_residual, exponential_rate, h1_norm, perturbation, perturbation_from_samples, sample_wave,
    sobolev_check, weight_w, zero_order_energy, DiagnosticsRecord,
};
use nsp_core::nsp_solver::{make_initial_data, run, BumpShape, FluidState, Grid, Perturbation, SolverConfig};
use nsp_core::wave_profile::ContactWaveField;

fn volume_bump(amplitude: f64) -> Perturbation {
    Perturbation {
        amplitude,
        center: 0.0,
        width: 2.0,
        shape: BumpShape::Gaussian,
        weights: [1.0, 0.5, 0.5],
    }
}

fn boundary_run(wave: &ContactWaveField, n: usize, t_end: f64) -> Vec<DiagnosticsRecord> {
    let grid = Grid::new(40.0, n).unwrap();
    let initial = make_initial_data(wave, &volume_bump(2e-2), &grid, 1e-13, 30).unwrap();
    let cfg = SolverConfig {
        dt: 0.25 * grid.h(),
        t_end,
        cadence: 0.25,
        theta_scheme: 0.5,
        newton_tol: 1e-13,
        ..Default::default()
    };
    run(&initial, &cfg, &grid, wave.model(), wave.gas(), wave, &mut |_, _| Ok(()))
        .unwrap()
        .records
}

#[test]
fn unperturbed_data_has_no_perturbation() {
    let wave = baseline();
    let grid = Grid::new(30.0, 600).unwrap();
    let s = make_initial_data(&wave, &Perturbation::none(), &grid, 1e-12, 30).unwrap();
    let p = perturbation(&s, &grid, &wave).unwrap();
    for f in [&p.varphi, &p.psi, &p.zeta] {
        assert!(f.iter().all(|x| x.abs() <= 1e-12));
    }
    assert_eq!(p.zeta[0], 0.0);
    assert!(p.sigma[p.sigma.len() - 1].abs() <= 1e-8);
}

#[test]
fn energy_is_quadratic_in_the_amplitude() {
    let wave = baseline();
    let grid = Grid::new(20.0, 400).unwrap();
    let samples = sample_wave(&wave, &grid, 0.0).unwrap();
    let shape: Vec<f64> = (0..=400).map(|i| (-(grid.x(i) - 5.0).powi(2)).exp()).collect();
    let eps = [1e-4, 1e-3, 1e-2];
    let energies: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let field = |f: fn(&nsp_core::wave_profile::WaveSample) -> f64| -> Vec<f64> {
                samples.iter().zip(&shape).map(|(s, b)| f(s) + e * b).collect()
            };
            let state = FluidState {
                t: 0.0,
                v: field(|s| s.v),
                u: field(|s| s.u),
                theta: field(|s| s.theta),
                phi: field(|s| s.phi),
            };
            let pert = perturbation_from_samples(&state, &samples).unwrap();
            zero_order_energy(&pert, &state, &samples, wave.model(), wave.gas(), &grid).unwrap()
        })
        .collect();
    let slope = loglog_slope(&eps, &energies);
    assert!((slope - 2.0).abs() <= 0.1, "{slope}");

    let unperturbed = FluidState {
        t: 0.0,
        v: samples.iter().map(|s| s.v).collect(),
        u: samples.iter().map(|s| s.u).collect(),
        theta: samples.iter().map(|s| s.theta).collect(),
        phi: samples.iter().map(|s| s.phi).collect(),
    };
    let pert = perturbation_from_samples(&unperturbed, &samples).unwrap();
    assert_eq!(zero_order_energy(&pert, &unperturbed, &samples, wave.model(), wave.gas(), &grid).unwrap(), 0.0);
}

#[test]
fn boundary_identity_holds_to_second_order() {
    let wave = unit_pressure_wave(1.0, 4001);
    assert!((wave.ends().p_minus - 1.0).abs() <= 1e-14);
    let ns = [256, 512, 1024];
    let residuals: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let records = boundary_run(&wave, n, 2.0);
            let history: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.varphi0)).collect();
            let direct = boundary_identity_residual(&history, 1.0, 1.0);
            let tracked = records.iter().map(|r| r.boundary_residual).fold(0.0, f64::max);
            assert!((direct - tracked).abs() <= 1e-15);
            direct
        })
        .collect();
    let hs: Vec<f64> = ns.iter().map(|&n| 40.0 / n as f64).collect();
    let order = loglog_slope(&hs, &residuals);
    assert!((order - 2.0).abs() <= 0.2, "order {order}, residuals {residuals:?}");
}

#[test]
fn boundary_volume_decays_at_rate_pressure_over_viscosity() {
    let wave = unit_pressure_wave(0.5, 4001);
    let records = boundary_run(&wave, 512, 3.0);
    let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.varphi0.abs()).collect();
    let rate = exponential_rate(&ts, &ys).unwrap().slope;
    assert!((rate + 2.0).abs() <= 0.02, "{rate}");
}

#[test]
fn boundary_identity_is_trivial_without_boundary_perturbation() {
    let history = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
    assert_eq!(boundary_identity_residual(&history, 1.0, 1.0), 0.0);
    let exact: Vec<(f64, f64)> = (0..20).map(|k| (0.1 * k as f64, 0.3 * (-0.2 * k as f64).exp())).collect();
    assert!(boundary_identity_residual(&exact, 2.0, 1.0) <= 1e-15);
}

#[test]
fn weight_examples() {
    let wave = baseline();
    assert_eq!(weight_w(&wave, 0.0, 2.0), 0.0);
    let far = weight_w(&wave, 1e3, 2.0);
    let total = weight_w(&wave, 2.0 * wave.profile().xi_max() * 3f64.sqrt(), 2.0);
    assert!((far - total).abs() <= 1e-12 * total);
    let mut last = 0.0;
    for k in 0..200 {
        let w = weight_w(&wave, 0.1 * k as f64, 2.0);
        assert!(w >= last, "x = {}: {w} < {last}", 0.1 * k as f64);
        last = w;
    }
    let flat = wave_with(1.0, 1.0, 401);
    assert_eq!(weight_w(&flat, 3.0, 1.0), 0.0);
}

/// Same discretization as the library, summed from the right end.
fn h1_reversed(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    let mut d = vec![0.0; n];
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    for i in (1..n - 1).rev() {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    let trap = |g: &[f64]| {
        let mut s = 0.5 * (g[0] * g[0] + g[n - 1] * g[n - 1]);
        for i in (1..n - 1).rev() {
            s += g[i] * g[i];
        }
        s * h
    };
    (trap(f) + trap(&d)).sqrt()
}

#[test]
fn h1_norm_is_independent_of_summation_order() {
    let h = 0.01;
    let f: Vec<f64> = (0..3001).map(|i| (0.37 * i as f64 * h).sin() * (-(i as f64 * h - 7.0).powi(2)).exp()).collect();
    let a = h1_norm(&f, h);
    let b = h1_reversed(&f, h);
    assert!((a - b).abs() <= 1e-13 * a, "{a} vs {b}");
}

#[test]
fn sobolev_bound_holds_on_every_record() {
    let wave = baseline();
    let grid = Grid::new(30.0, 512).unwrap();
    let p = Perturbation {
        amplitude: 5e-2,
        center: 8.0,
        width: 1.0,
        shape: BumpShape::Compact,
        weights: [1.0, -1.0, 0.5],
    };
    let initial = make_initial_data(&wave, &p, &grid, 1e-12, 30).unwrap();
    let cfg = SolverConfig {
        t_end: 5.0,
        cadence: 0.25,
        ..Default::default()
    };
    let mut checked = 0;
    run(&initial, &cfg, &grid, wave.model(), wave.gas(), &wave, &mut |state, record| {
        let pert = perturbation(state, &grid, &wave)?;
        for f in pert.fields() {
            assert!(sobolev_check(f, grid.h()));
        }
        assert!(record.sobolev_ok);
        checked += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(checked, 21);
}
