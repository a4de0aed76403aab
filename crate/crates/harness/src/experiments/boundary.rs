//! boundary-identity: the boundary volume perturbation against its exact
//! exponential decay over a fan of grids.

use super::{csv, metric_pairs, write_file, PointData};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::summary::{Check, PointSummary};
use nsp_core::diagnostics::{exponential_rate, power_exponent, DiagnosticsRecord};
use nsp_core::nsp_solver::{make_initial_data, run as integrate};
use std::path::Path;

pub(super) fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<PointData> {
    let wave = cfg.wave()?;
    let grid = cfg.grid()?;
    let solver = cfg.solver_config();
    let initial = make_initial_data(&wave, &cfg.perturbation(), &grid, solver.newton_tol, solver.newton_max)?;
    let varphi00 = initial.v[0] - wave.ends().v_minus;
    if varphi00 == 0.0 {
        return Err(HarnessError::Config(
            "boundary-identity needs a volume perturbation that is nonzero at x = 0".into(),
        ));
    }
    let outcome = integrate(&initial, &solver, &grid, wave.model(), wave.gas(), &wave, &mut |_, _| Ok(()));
    let records = match &outcome {
        Ok(o) => &o.records,
        Err(f) => &f.records,
    };
    let mut diag = Vec::new();
    DiagnosticsRecord::write_csv(records, &mut diag)?;
    write_file(&dir.join("diagnostics.csv"), diag)?;
    let p_minus = wave.ends().p_minus;
    let mu = wave.gas().mu;
    let rows: Vec<Vec<f64>> = records
        .iter()
        .map(|r| vec![r.t, r.varphi0, varphi00 * (-p_minus * r.t / mu).exp(), r.boundary_residual])
        .collect();
    write_file(&dir.join("boundary.csv"), csv(&["t", "varphi0", "exact", "residual"], &rows))?;
    let outcome = outcome.map_err(|f| f.error)?;

    let residual = outcome.records.iter().fold(0.0f64, |m, r| m.max(r.boundary_residual));
    let (ts, ys): (Vec<f64>, Vec<f64>) = outcome
        .records
        .iter()
        .filter(|r| r.varphi0 != 0.0)
        .map(|r| (r.t, r.varphi0.abs()))
        .unzip();
    let rate = exponential_rate(&ts, &ys).map_or(f64::NAN, |f| f.slope);
    let mut data = PointData::default();
    data.metric("h", grid.h());
    data.metric("varphi0_initial", varphi00);
    data.metric("max_residual", residual);
    data.metric("decay_rate", rate);
    data.metric("rate_target", -p_minus / mu);
    Ok(data)
}

/// Convergence order of the residual and the decay rate on the finest grid.
pub(super) fn aggregate(points: &[PointSummary]) -> Vec<Check> {
    let mut out = Vec::new();
    let (hs, res) = metric_pairs(points, "h", "max_residual");
    if hs.len() >= 2 {
        let order = power_exponent(&hs, &res).map_or(f64::NAN, |f| f.slope);
        out.push(Check::within("boundary_residual_order", order, 2.0, 0.2));
    }
    let finest = points
        .iter()
        .filter(|p| p.error.is_none() && p.metrics.contains_key("decay_rate"))
        .min_by(|a, b| a.metrics["h"].total_cmp(&b.metrics["h"]));
    if let Some(p) = finest {
        let target = p.metrics["rate_target"];
        out.push(Check::within("boundary_decay_rate", p.metrics["decay_rate"], target, 0.05 * target.abs()));
    }
    out
}
