//! Experiment orchestration and the output tree.
//!
//! `out/` holds the resolved configuration and `summary.json`; every sweep
//! point writes its artifacts to `out/<point name>/`. No file contains
//! timings or host details, so equal configurations give equal bytes.

mod boundary;
mod fans;
mod poisson;
mod profile;
mod stability;

pub use poisson::poisson_checks;

use crate::config::{ExperimentConfig, ExperimentKind, SweepAxis, SweepPoint};
use crate::error::{HarnessError, Result};
use crate::summary::{apply_tolerances, Check, PointSummary, Status, Summary};
use crate::sweep::sweep_parallel;
use std::collections::BTreeMap;
use std::path::Path;

/// Checks and scalar results of one sweep point.
#[derive(Debug, Default)]
pub(crate) struct PointData {
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
}

impl PointData {
    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }
}

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

/// The sweep an experiment kind runs when the configuration names none.
pub fn default_sweep(kind: ExperimentKind) -> Option<SweepAxis> {
    let floats = |v: &[f64]| v.iter().map(|&x| toml::Value::Float(x)).collect();
    match kind {
        ExperimentKind::KappaSweep => Some(SweepAxis {
            param: "physics.kappa".into(),
            values: floats(&[0.25, 0.5, 1.0, 2.0]),
        }),
        ExperimentKind::DecaySuite => Some(SweepAxis {
            param: "physics.delta".into(),
            values: floats(&[0.05, 0.1, 0.2]),
        }),
        ExperimentKind::BoundaryIdentity => Some(SweepAxis {
            param: "numerics.N".into(),
            values: [512i64, 1024, 2048].iter().map(|&n| toml::Value::Integer(n)).collect(),
        }),
        ExperimentKind::ProfileVerify | ExperimentKind::StabilityRun => None,
    }
}

/// Resolves the experiment kind from the command and the configuration.
pub fn resolve_kind(cfg: &ExperimentConfig, requested: ExperimentKind) -> Result<ExperimentConfig> {
    if let Some(k) = cfg.experiment.kind {
        if k != requested {
            return Err(HarnessError::Config(format!(
                "configuration is for {k} but {requested} was requested"
            )));
        }
    }
    let mut cfg = cfg.clone();
    cfg.experiment.kind = Some(requested);
    if cfg.experiment.sweep.is_empty() {
        if let Some(axis) = default_sweep(requested) {
            cfg.experiment.sweep.push(axis);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one experiment into `out` with `workers` threads and returns the
/// summary that was written to `out/summary.json`.
pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig, out: &Path, workers: usize) -> Result<Summary> {
    let cfg = resolve_kind(cfg, kind)?;
    create_dir(out)?;
    write_file(&out.join("resolved.toml"), cfg.resolved_toml())?;
    let points = cfg.sweep_points();
    let results = sweep_parallel(&points, workers, |p| run_point(kind, p, out));
    let mut checks: Vec<Check> = Vec::new();
    let single = results.len() == 1;
    for r in &results {
        checks.extend(r.checks.iter().map(|c| if single { c.clone() } else { c.clone().prefixed(&r.name) }));
    }
    let aggregate = match kind {
        ExperimentKind::KappaSweep => fans::kappa_aggregate(&results),
        ExperimentKind::DecaySuite => fans::decay_aggregate(&results),
        ExperimentKind::BoundaryIdentity => boundary::aggregate(&results),
        ExperimentKind::ProfileVerify | ExperimentKind::StabilityRun => Vec::new(),
    };
    let aggregate = apply_tolerances(aggregate, &cfg.experiment.tolerances);
    checks.extend(aggregate);
    let status = results
        .iter()
        .map(|r| r.status)
        .chain(std::iter::once(Status::from_checks(&checks)))
        .max()
        .unwrap_or(Status::Pass);
    let summary = Summary {
        kind: kind.to_string(),
        config_hash: cfg.config_hash(),
        status,
        checks,
        points: results,
    };
    write_file(&out.join("summary.json"), summary.to_json())?;
    Ok(summary)
}

fn run_point(kind: ExperimentKind, point: &SweepPoint, out: &Path) -> PointSummary {
    let dir = out.join(&point.name);
    let mut summary = PointSummary {
        name: point.name.clone(),
        status: Status::Pass,
        error: None,
        metrics: BTreeMap::new(),
        checks: Vec::new(),
    };
    let outcome = match &point.config {
        Err(e) => Err(HarnessError::Config(e.clone())),
        Ok(cfg) => create_dir(&dir)
            .and_then(|_| write_file(&dir.join("resolved.toml"), cfg.resolved_toml()))
            .and_then(|_| match kind {
                ExperimentKind::ProfileVerify => profile::run(cfg, &dir),
                ExperimentKind::StabilityRun => stability::run(cfg, &dir),
                ExperimentKind::KappaSweep => fans::kappa_point(cfg, &dir),
                ExperimentKind::DecaySuite => fans::decay_point(cfg, &dir),
                ExperimentKind::BoundaryIdentity => boundary::run(cfg, &dir),
            })
            .map(|data| (cfg, data)),
    };
    match outcome {
        Ok((cfg, data)) => {
            summary.checks = apply_tolerances(data.checks, &cfg.experiment.tolerances);
            summary.metrics = data.metrics;
            summary.status = Status::from_checks(&summary.checks);
        }
        Err(e) => {
            summary.status = if e.exit_code() == 2 {
                Status::ConfigError
            } else {
                Status::SolverFailure
            };
            summary.error = Some(e.to_string());
        }
    }
    if dir.is_dir() {
        let json = serde_json::to_string_pretty(&summary).expect("point summary serializes") + "\n";
        if let Err(e) = write_file(&dir.join("summary.json"), json) {
            summary.status = summary.status.max(Status::SolverFailure);
            summary.error = Some(e.to_string());
        }
    }
    summary
}

/// Metric values of the points that produced `key`, with the matching `x`.
pub(crate) fn metric_pairs(points: &[PointSummary], x: &str, y: &str) -> (Vec<f64>, Vec<f64>) {
    points
        .iter()
        .filter(|p| p.error.is_none())
        .filter_map(|p| Some((*p.metrics.get(x)?, *p.metrics.get(y)?)))
        .unzip()
}

/// Formats rows of numbers as CSV with a header.
pub(crate) fn csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}
