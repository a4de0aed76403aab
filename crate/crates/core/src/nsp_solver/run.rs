//! Time integration to `t_end` with records at a fixed cadence.

use super::step::Stepper;
use super::{FluidState, Grid, SolverConfig};
use crate::diagnostics::{DiagnosticsRecord, DiagnosticsTracker};
use crate::electron_density::ElectronDensityModel;
use crate::error::{NspError, Result};
use crate::wave_profile::{ContactWaveField, GasParams};

/// Largest number of successive step halvings after a Poisson failure.
const MAX_HALVINGS: u32 = 5;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: FluidState,
    pub records: Vec<DiagnosticsRecord>,
    pub steps: usize,
    pub max_mass_defect: f64,
    pub halvings: usize,
}

/// A failed run: the error, the last accepted state and the records so far.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: NspError,
    pub state: FluidState,
    pub records: Vec<DiagnosticsRecord>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "run aborted at t = {}: {}", self.state.t, self.error)
    }
}

impl std::error::Error for RunFailure {}

struct Counters {
    steps: usize,
    max_mass_defect: f64,
    halvings: usize,
}

fn advance(
    stepper: &mut Stepper,
    state: &FluidState,
    dt: f64,
    depth: u32,
    counters: &mut Counters,
) -> Result<FluidState> {
    match stepper.step(state, dt) {
        Ok((next, report)) => {
            counters.steps += 1;
            counters.max_mass_defect = counters.max_mass_defect.max(report.mass_defect);
            Ok(next)
        }
        Err(NspError::NewtonDivergence { .. } | NspError::Domain { .. }) if depth < MAX_HALVINGS => {
            counters.halvings += 1;
            let mid = advance(stepper, state, 0.5 * dt, depth + 1, counters)?;
            advance(stepper, &mid, 0.5 * dt, depth + 1, counters)
        }
        Err(e) => Err(e),
    }
}

/// Integrates from `initial` to `cfg.t_end`. A record is taken at the start
/// and at every multiple of `cfg.cadence` (and at `t_end`); each record is
/// passed to `observer` together with its state.
#[allow(clippy::too_many_arguments, clippy::result_large_err)]
pub fn run(
    initial: &FluidState,
    cfg: &SolverConfig,
    grid: &Grid,
    model: &ElectronDensityModel,
    gas: &GasParams,
    wave: &ContactWaveField,
    observer: &mut dyn FnMut(&FluidState, &DiagnosticsRecord) -> Result<()>,
) -> std::result::Result<RunOutcome, RunFailure> {
    let fail = |error: NspError, state: &FluidState, records: &[DiagnosticsRecord]| RunFailure {
        error,
        state: state.clone(),
        records: records.to_vec(),
    };
    let mut records = Vec::new();
    let mut stepper = match Stepper::new(*grid, *cfg, *model, *gas, *wave.ends()) {
        Ok(s) => s,
        Err(e) => return Err(fail(e, initial, &records)),
    };
    if let Err(e) = initial.check_shape(grid).and_then(|_| initial.check_positivity()) {
        return Err(fail(e, initial, &records));
    }
    let mut tracker = DiagnosticsTracker::new(wave, *grid);
    let mut state = initial.clone();
    let mut emit = |state: &FluidState, records: &mut Vec<DiagnosticsRecord>| -> Result<()> {
        let rec = tracker.record(state)?;
        observer(state, &rec)?;
        records.push(rec);
        Ok(())
    };
    if let Err(e) = emit(&state, &mut records) {
        return Err(fail(e, &state, &records));
    }
    let mut counters = Counters {
        steps: 0,
        max_mass_defect: 0.0,
        halvings: 0,
    };
    let t0 = state.t;
    let mut k: u64 = 0;
    // Tolerance for landing on t_end.
    let eps = 1e-12 * cfg.t_end.abs().max(1.0);
    while state.t < cfg.t_end - eps {
        k += 1;
        let mut target = t0 + k as f64 * cfg.cadence;
        if target > cfg.t_end - eps {
            target = cfg.t_end;
        }
        let interval = target - state.t;
        let dt_max = stepper.stable_dt(&state);
        let steps = (interval / dt_max).ceil().max(1.0) as usize;
        let dt = interval / steps as f64;
        for _ in 0..steps {
            state = match advance(&mut stepper, &state, dt, 0, &mut counters) {
                Ok(s) => s,
                Err(e) => return Err(fail(e, &state, &records)),
            };
        }
        state.t = target;
        if let Err(e) = emit(&state, &mut records) {
            return Err(fail(e, &state, &records));
        }
    }
    Ok(RunOutcome {
        state,
        records,
        steps: counters.steps,
        max_mass_defect: counters.max_mass_defect,
        halvings: counters.halvings,
    })
}
