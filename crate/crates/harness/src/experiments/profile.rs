//! profile-verify: invariants, residual decay, decay integrals and distances
//! of the viscous contact wave.

use super::{csv, write_file, PointData};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::summary::Check;
use nsp_core::diagnostics::{decay_fit, power_exponent};
use nsp_core::wave_profile::{solve_self_similar, write_profile_table, ContactWaveField, SelfSimilarNumerics};
use std::path::Path;

/// Largest deviation accepted for a vanishing quantity of the constant wave.
const TRIVIAL_TOL: f64 = 1e-12;

pub(super) fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<PointData> {
    let wave = cfg.wave()?;
    let mut table = Vec::new();
    write_profile_table(&wave, &mut table)?;
    write_file(&dir.join("profile.txt"), table)?;
    let mut data = PointData::default();
    data.metric("delta", wave.ends().delta);
    closure_checks(&wave, &mut data)?;
    profile_checks(&wave, &cfg.profile_numerics(), &mut data)?;
    decay_checks(&wave, &cfg.experiment.times, dir, &mut data)?;
    Ok(data)
}

fn closure_checks(wave: &ContactWaveField, data: &mut PointData) -> Result<()> {
    let e = *wave.ends();
    let c = wave.closure();
    let end_error = (c.v_of_theta(e.theta_minus)? - e.v_minus)
        .abs()
        .max((c.v_of_theta(e.theta_plus)? - e.v_plus).abs());
    data.checks.push(Check::at_most("closure_endpoints", end_error, 1e-9));

    let fp_min = wave.f_prime_nodes().iter().fold(f64::INFINITY, |m, x| m.min(*x));
    data.checks.push(Check::above("closure_fprime_positive", fp_min, 0.0));
    let g_min = wave.g_nodes().iter().fold(f64::INFINITY, |m, x| m.min(*x));
    data.checks.push(Check::above("closure_g_positive", g_min, 0.0));

    // Relative central differences of f at interior temperatures.
    let mut fd_err = 0.0f64;
    if e.delta > 0.0 {
        let h = 1e-6 * e.theta_plus.max(e.theta_minus);
        for k in 1..200 {
            let theta = e.theta_plus + (e.theta_minus - e.theta_plus) * k as f64 / 200.0;
            let fd = (c.v_of_theta(theta + h)? - c.v_of_theta(theta - h)?) / (2.0 * h);
            let fp = c.f_prime(theta)?;
            fd_err = fd_err.max(((fp - fd) / fp).abs());
        }
    }
    data.checks.push(Check::at_most("closure_fprime_fd", fd_err, 1e-6));

    let model = wave.model();
    let gas = wave.gas();
    let mut compat = 0.0f64;
    for (th, v) in wave.profile().theta.iter().zip(wave.v_nodes()) {
        let r = gas.r * th / v + model.quasineutral_pressure(*v, e.v_minus)? - e.p_minus;
        compat = compat.max(r.abs());
    }
    data.checks.push(Check::at_most("closure_compatibility", compat, 1e-10));
    Ok(())
}

fn profile_checks(wave: &ContactWaveField, numerics: &SelfSimilarNumerics, data: &mut PointData) -> Result<()> {
    let e = *wave.ends();
    let p = wave.profile();
    data.checks.push(Check::at_most("profile_residual", p.residual_norm, 1e-10));
    let dir = (e.theta_plus - e.theta_minus).signum();
    // Strictness is required until the profile reaches theta_+ to rounding.
    let flat = 1e-10 * e.delta.max(f64::MIN_POSITIVE);
    let violations = p
        .theta
        .windows(2)
        .filter(|w| {
            let step = dir * (w[1] - w[0]);
            step < 0.0 || (step == 0.0 && e.delta > 0.0 && (w[0] - e.theta_plus).abs() > flat)
        })
        .count();
    data.checks.push(Check::at_most("profile_monotone", violations as f64, 0.0));
    let last = p.theta.len() - 1;
    data.checks.push(Check::at_most("profile_left_endpoint", (p.theta[0] - e.theta_minus).abs(), 1e-8));
    data.checks.push(Check::at_most("profile_right_endpoint", (p.theta[last] - e.theta_plus).abs(), 1e-8));

    // Self-convergence of the base second-order discretization.
    let coarse_nodes = (numerics.n_nodes - 1) / 4 + 1;
    let solve = |n: usize| {
        let num = SelfSimilarNumerics {
            n_nodes: n,
            correction_sweeps: 0,
            ..*numerics
        };
        solve_self_similar(wave.closure(), wave.gas().kappa, &num).map(|p| p.theta)
    };
    let a = solve(coarse_nodes)?;
    let b = solve(2 * coarse_nodes - 1)?;
    let r = solve(4 * coarse_nodes - 3)?;
    let diff = |coarse: &[f64], fine: &[f64]| {
        let stride = (fine.len() - 1) / (coarse.len() - 1);
        coarse
            .iter()
            .enumerate()
            .map(|(j, x)| (x - fine[j * stride]).abs())
            .fold(0.0, f64::max)
    };
    let (d1, d2) = (diff(&a, &b), diff(&b, &r));
    if e.delta == 0.0 {
        data.checks.push(Check::at_most("profile_self_convergence", d1.max(d2), TRIVIAL_TOL));
    } else {
        data.metric("self_convergence_ratio", d1 / d2);
        data.checks.push(Check::within("profile_self_convergence", d1 / d2, 4.0, 0.8));
    }
    Ok(())
}

/// Log-log slope against `1 + t`, or the largest value for the constant wave.
fn slope_check(name: &str, times: &[f64], values: &[f64], target: f64, tol: f64, trivial: bool) -> Check {
    if trivial {
        return Check::at_most(name, values.iter().fold(0.0, |m, x| m.max(x.abs())), TRIVIAL_TOL);
    }
    let samples: Vec<(f64, f64)> = times.iter().copied().zip(values.iter().copied()).collect();
    let slope = decay_fit(&samples).map_or(f64::NAN, |f| f.slope);
    Check::within(name, slope, target, tol)
}

fn decay_checks(wave: &ContactWaveField, times: &[f64], dir: &Path, data: &mut PointData) -> Result<()> {
    let trivial = wave.ends().delta == 0.0;
    let mut rows = Vec::new();
    let (mut r1, mut r2, mut r3) = (Vec::new(), Vec::new(), Vec::new());
    let (mut i4, mut ixx, mut ixxx, mut ix) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let (mut l1, mut l2, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for &t in times {
        let r = wave.wave_residuals(t)?;
        let d = wave.profile_decay_integrals(t);
        let (a, b) = (wave.lp_distance_to_sharp(1.0, t), wave.lp_distance_to_sharp(2.0, t));
        let ws = wave.weight_sup(t);
        rows.push(vec![t, r.r1, r.r2, r.r3, d.i4, d.i2xx, d.i2xxx, d.ix_weighted, a, b, ws]);
        r1.push(r.r1);
        r2.push(r.r2);
        r3.push(r.r3);
        i4.push(d.i4);
        ixx.push(d.i2xx);
        ixxx.push(d.i2xxx);
        ix.push(d.ix_weighted);
        l1.push(a);
        l2.push(b);
        w.push(ws);
    }
    write_file(
        &dir.join("decay.csv"),
        csv(
            &["t", "r1", "r2", "r3", "i4", "i2xx", "i2xxx", "ix_weighted", "l1_distance", "l2_distance", "weight_sup"],
            &rows,
        ),
    )?;
    let c = &mut data.checks;
    c.push(slope_check("residual_r1_slope", times, &r1, -1.5, 0.15, trivial));
    c.push(slope_check("residual_r2_slope", times, &r2, -2.0, 0.2, trivial));
    c.push(slope_check("residual_r3_slope", times, &r3, -1.0, 0.1, trivial));
    c.push(slope_check("integral_i4_slope", times, &i4, -1.5, 0.15, trivial));
    c.push(slope_check("integral_i2xx_slope", times, &ixx, -1.5, 0.15, trivial));
    c.push(slope_check("integral_i2xxx_slope", times, &ixxx, -2.5, 0.25, trivial));
    if trivial {
        c.push(Check::at_most("integral_ix_bounded", ix.iter().fold(0.0, |m, x| m.max(*x)), TRIVIAL_TOL));
    } else {
        let (lo, hi) = ix.iter().fold((f64::INFINITY, 0.0f64), |(l, h), x| (l.min(*x), h.max(*x)));
        c.push(Check::at_most("integral_ix_bounded", hi / lo, 2.0));
    }
    let lp_exponent = |ys: &[f64]| {
        let xs: Vec<f64> = times.iter().map(|t| 1.0 + t).collect();
        power_exponent(&xs, ys).map_or(f64::NAN, |f| f.slope)
    };
    if trivial {
        let worst = l1.iter().chain(&l2).chain(&w).fold(0.0, |m: f64, x| m.max(*x));
        c.push(Check::at_most("distance_l1_time_exponent", worst, TRIVIAL_TOL));
        c.push(Check::at_most("distance_l2_time_exponent", worst, TRIVIAL_TOL));
        c.push(Check::at_most("weight_time_slope", worst, TRIVIAL_TOL));
        c.push(Check::at_most("tail_envelope", 0.0, TRIVIAL_TOL));
        return Ok(());
    }
    c.push(Check::within("distance_l1_time_exponent", lp_exponent(&l1), 0.5, 0.05));
    c.push(Check::within("distance_l2_time_exponent", lp_exponent(&l2), 0.25, 0.05));
    c.push(slope_check("weight_time_slope", times, &w, -0.5, 0.1, false));
    let t0 = times[0];
    let ratio = match wave.fit_gaussian_tail(t0) {
        Some(env) => {
            let mut worst = 0.0f64;
            for &t in times.iter().filter(|&&t| t > t0) {
                worst = worst.max(wave.tail_envelope_ratio(&env, t)?);
            }
            worst
        }
        None => f64::NAN,
    };
    c.push(Check::at_most("tail_envelope", ratio, 1.0 + 1e-9));
    Ok(())
}
