//! Parameter fans over the wave: kappa-sweep and decay-suite.

use super::{csv, metric_pairs, write_file, PointData};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::summary::{Check, PointSummary};
use nsp_core::diagnostics::power_exponent;
use std::path::Path;

fn exponent(xs: &[f64], ys: &[f64]) -> f64 {
    power_exponent(xs, ys).map_or(f64::NAN, |f| f.slope)
}

/// `L^1` and `L^2` distance to the sharp contact at the probe time.
pub(super) fn kappa_point(cfg: &ExperimentConfig, dir: &Path) -> Result<PointData> {
    let wave = cfg.wave()?;
    let t = cfg.experiment.probe_time;
    let (l1, l2) = (wave.lp_distance_to_sharp(1.0, t), wave.lp_distance_to_sharp(2.0, t));
    write_file(
        &dir.join("distance.csv"),
        csv(&["kappa", "t", "l1_distance", "l2_distance"], &[vec![cfg.physics.kappa, t, l1, l2]]),
    )?;
    let mut data = PointData::default();
    data.metric("kappa", cfg.physics.kappa);
    data.metric("l1_distance", l1);
    data.metric("l2_distance", l2);
    Ok(data)
}

pub(super) fn kappa_aggregate(points: &[PointSummary]) -> Vec<Check> {
    let mut out = Vec::new();
    for (name, key, target) in [
        ("kappa_exponent_l1", "l1_distance", 0.5),
        ("kappa_exponent_l2", "l2_distance", 0.25),
    ] {
        let (k, d) = metric_pairs(points, "kappa", key);
        if k.len() >= 2 {
            out.push(Check::within(name, exponent(&k, &d), target, 0.05));
        }
    }
    out
}

const DECAY_METRICS: [(&str, f64, f64); 8] = [
    ("r1", 1.0, 0.3),
    ("r2", 1.0, 0.3),
    ("r3", 1.0, 0.3),
    ("i4", 4.0, 0.3),
    ("i2xx", 2.0, 0.3),
    ("i2xxx", 2.0, 0.3),
    ("ix_weighted", 1.0, 0.3),
    ("weight_sup", 2.0, 0.2),
];

/// Residuals, decay integrals and the weight at the probe time.
pub(super) fn decay_point(cfg: &ExperimentConfig, dir: &Path) -> Result<PointData> {
    let wave = cfg.wave()?;
    let t = cfg.experiment.probe_time;
    let r = wave.wave_residuals(t)?;
    let d = wave.profile_decay_integrals(t);
    let values = [r.r1, r.r2, r.r3, d.i4, d.i2xx, d.i2xxx, d.ix_weighted, wave.weight_sup(t)];
    let mut data = PointData::default();
    let delta = wave.ends().delta;
    data.metric("delta", delta);
    let mut header = vec!["delta", "t"];
    let mut row = vec![delta, t];
    for ((name, _, _), v) in DECAY_METRICS.iter().zip(values) {
        data.metric(name, v);
        header.push(name);
        row.push(v);
    }
    write_file(&dir.join("decay.csv"), csv(&header, &[row]))?;
    Ok(data)
}

/// Exponents of every metric against the wave strength.
pub(super) fn decay_aggregate(points: &[PointSummary]) -> Vec<Check> {
    let mut out = Vec::new();
    for (name, target, tol) in DECAY_METRICS {
        let (ds, ys) = metric_pairs(points, "delta", name);
        if ds.len() >= 2 {
            out.push(Check::within(format!("delta_exponent_{name}"), exponent(&ds, &ys), target, tol));
        }
    }
    out
}
