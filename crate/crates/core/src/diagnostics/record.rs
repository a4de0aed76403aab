//! Per-record diagnostics and their CSV form.

use std::io::Write;

use super::norms::{h1_norm, l2_norm, sobolev_check, sup_norm};
use super::{perturbation_from_samples, sample_wave, zero_order_energy};
use crate::error::{NspError, Result};
use crate::nsp_solver::{FluidState, Grid};
use crate::wave_profile::ContactWaveField;

pub const SCHEMA_VERSION: u32 = 1;

const FIELD_NAMES: [&str; 4] = ["varphi", "psi", "zeta", "sigma"];

/// Diagnostics of one state. Array entries follow `(varphi, psi, zeta, sigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub varphi0: f64,
    /// `|varphi(0, t) - varphi(0, 0) exp(-p_- t / mu)|`.
    pub boundary_residual: f64,
    pub l2: [f64; 4],
    pub h1: [f64; 4],
    pub sup: [f64; 4],
    /// Euclidean combination of the four H^1 norms.
    pub h1_total: f64,
    pub sup_total: f64,
    pub zero_order_energy: f64,
    pub weight_sup: f64,
    /// The discrete Sobolev inequality holds for all four fields.
    pub sobolev_ok: bool,
}

impl DiagnosticsRecord {
    pub fn csv_header() -> String {
        let mut cols = vec!["schema_version".to_string(), "t".into(), "varphi0".into(), "boundary_residual".into()];
        for norm in ["l2", "h1", "sup"] {
            for f in FIELD_NAMES {
                cols.push(format!("{norm}_{f}"));
            }
        }
        cols.extend(
            [
                "h1_total",
                "sup_total",
                "zero_order_energy",
                "weight_sup",
                "sobolev_ok",
                "log_1pt",
                "log_h1_total",
                "log_sup_total",
                "log_energy",
            ]
            .map(String::from),
        );
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cells = vec![
            SCHEMA_VERSION.to_string(),
            format!("{:e}", self.t),
            format!("{:e}", self.varphi0),
            format!("{:e}", self.boundary_residual),
        ];
        for arr in [&self.l2, &self.h1, &self.sup] {
            cells.extend(arr.iter().map(|x| format!("{x:e}")));
        }
        for x in [self.h1_total, self.sup_total, self.zero_order_energy, self.weight_sup] {
            cells.push(format!("{x:e}"));
        }
        cells.push(u8::from(self.sobolev_ok).to_string());
        for x in [
            (1.0 + self.t).ln(),
            self.h1_total.ln(),
            self.sup_total.ln(),
            self.zero_order_energy.ln(),
        ] {
            cells.push(format!("{x:e}"));
        }
        cells.join(",")
    }

    pub fn write_csv<W: Write>(records: &[DiagnosticsRecord], mut out: W) -> Result<()> {
        let io = |e: std::io::Error| NspError::InvalidInput(format!("i/o error: {e}"));
        writeln!(out, "{}", Self::csv_header()).map_err(io)?;
        for r in records {
            writeln!(out, "{}", r.csv_row()).map_err(io)?;
        }
        Ok(())
    }
}

/// Builds records for successive states of one run.
#[derive(Debug)]
pub struct DiagnosticsTracker<'a> {
    wave: &'a ContactWaveField,
    grid: Grid,
    varphi0_initial: Option<f64>,
}

impl<'a> DiagnosticsTracker<'a> {
    pub fn new(wave: &'a ContactWaveField, grid: Grid) -> Self {
        Self {
            wave,
            grid,
            varphi0_initial: None,
        }
    }

    /// The first recorded state fixes `varphi(0, 0)`.
    pub fn record(&mut self, state: &FluidState) -> Result<DiagnosticsRecord> {
        let samples = sample_wave(self.wave, &self.grid, state.t)?;
        let pert = perturbation_from_samples(state, &samples)?;
        let h = self.grid.h();
        let fields = pert.fields();
        let l2 = fields.map(|f| l2_norm(f, h));
        let h1 = fields.map(|f| h1_norm(f, h));
        let sup = fields.map(sup_norm);
        let gas = self.wave.gas();
        let varphi0 = pert.varphi[0];
        let initial = *self.varphi0_initial.get_or_insert(varphi0);
        let energy = zero_order_energy(&pert, state, &samples, self.wave.model(), gas, &self.grid)?;
        Ok(DiagnosticsRecord {
            t: state.t,
            varphi0,
            boundary_residual: (varphi0 - initial * (-self.wave.ends().p_minus * state.t / gas.mu).exp()).abs(),
            l2,
            h1,
            sup,
            h1_total: h1.iter().map(|x| x * x).sum::<f64>().sqrt(),
            sup_total: sup.iter().fold(0.0, |m, x| m.max(*x)),
            zero_order_energy: energy,
            weight_sup: self.wave.weight_sup(state.t),
            sobolev_ok: fields.iter().all(|f| sobolev_check(f, h)),
        })
    }
}
