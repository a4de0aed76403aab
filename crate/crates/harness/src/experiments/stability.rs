//! stability-run: a perturbed wave integrated with the diagnostics stream.

use super::{poisson_checks, write_file, PointData};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::summary::Check;
use nsp_core::diagnostics::DiagnosticsRecord;
use nsp_core::nsp_solver::{make_initial_data, run as integrate, write_snapshot, FluidState, Grid};
use std::path::Path;

fn snapshot(path: &Path, state: &FluidState, grid: &Grid, hash: &str) -> Result<()> {
    let mut buf = Vec::new();
    write_snapshot(state, grid, hash, &mut buf)?;
    write_file(path, buf)
}

/// Record closest to time `t`.
fn record_near(records: &[DiagnosticsRecord], t: f64) -> &DiagnosticsRecord {
    records
        .iter()
        .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
        .expect("a run has at least one record")
}

pub(super) fn run(cfg: &ExperimentConfig, dir: &Path) -> Result<PointData> {
    let wave = cfg.wave()?;
    let grid = cfg.grid()?;
    let solver = cfg.solver_config();
    let hash = cfg.config_hash();
    let initial = make_initial_data(&wave, &cfg.perturbation(), &grid, solver.newton_tol, solver.newton_max)?;
    snapshot(&dir.join("snapshot_initial.txt"), &initial, &grid, &hash)?;
    let outcome = integrate(&initial, &solver, &grid, wave.model(), wave.gas(), &wave, &mut |_, _| Ok(()));
    let (records, last) = match &outcome {
        Ok(o) => (&o.records, &o.state),
        Err(f) => (&f.records, &f.state),
    };
    let mut diag = Vec::new();
    DiagnosticsRecord::write_csv(records, &mut diag)?;
    write_file(&dir.join("diagnostics.csv"), diag)?;
    snapshot(&dir.join("snapshot_final.txt"), last, &grid, &hash)?;
    let outcome = outcome.map_err(|f| HarnessError::Solver(f.error))?;
    let records = &outcome.records;

    let mut data = PointData::default();
    let first = &records[0];
    let end = &records[records.len() - 1];
    data.metric("steps", outcome.steps as f64);
    data.metric("halvings", outcome.halvings as f64);
    data.metric("t_reached", end.t);
    let c = &mut data.checks;
    c.push(Check::within("run_completed", end.t, solver.t_end, 1e-9));
    let positive = outcome.state.check_positivity().is_ok();
    c.push(Check::at_most("invariant_violations", if positive { 0.0 } else { 1.0 }, 0.0));
    c.push(Check::at_most("mass_compatibility", outcome.max_mass_defect, 1e-12));
    if solver.t_end > 1.0 {
        let early = record_near(records, 1.0);
        c.push(Check::below("sup_decreases", end.sup_total / early.sup_total, 1.0));
    }
    let h1_max = records.iter().fold(0.0f64, |m, r| m.max(r.h1_total));
    c.push(Check::at_most("h1_bounded", h1_max / first.h1_total, 3.0));
    let e_min = records.iter().fold(f64::INFINITY, |m, r| m.min(r.zero_order_energy));
    let e_max = records.iter().fold(0.0f64, |m, r| m.max(r.zero_order_energy));
    c.push(Check::at_least("energy_nonnegative", e_min, 0.0));
    c.push(Check::at_most("energy_bounded", e_max / first.zero_order_energy, 3.0));
    let sobolev_failures = records.iter().filter(|r| !r.sobolev_ok).count();
    c.push(Check::at_most("sobolev_inequality", sobolev_failures as f64, 0.0));
    c.extend(poisson_checks(wave.model())?);
    Ok(data)
}
