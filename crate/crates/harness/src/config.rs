//! Experiment configuration: three TOML sections with strict keys.
//!
//! Missing keys take the baseline defaults. Unknown keys, duplicate keys and
//! physically inadmissible values are rejected at load time.

use crate::error::{HarnessError, Result};
use nsp_core::nsp_solver::{BumpShape, FarFieldBc, Grid, Perturbation, SolverConfig};
use nsp_core::wave_profile::{ContactWaveField, GasParams, QuasineutralClosure, RightState, SelfSimilarNumerics};
use nsp_core::ElectronDensityModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ProfileVerify,
    StabilityRun,
    KappaSweep,
    BoundaryIdentity,
    DecaySuite,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ProfileVerify => "profile-verify",
            Self::StabilityRun => "stability-run",
            Self::KappaSweep => "kappa-sweep",
            Self::BoundaryIdentity => "boundary-identity",
            Self::DecaySuite => "decay-suite",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityName {
    Boltzmann,
    Generalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    #[serde(rename = "R")]
    pub r: f64,
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
    /// Left pressure. Exclusive with `delta`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_minus: Option<f64>,
    /// Wave strength: the left temperature becomes `theta_plus + delta`.
    /// Used when `p_minus` is absent; defaults to 0.1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub v_plus: f64,
    pub u_plus: f64,
    pub theta_plus: f64,
    pub density_kind: DensityName,
    pub gamma_e: f64,
    #[serde(rename = "A_e")]
    pub a_e: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            r: 1.0,
            gamma: 5.0 / 3.0,
            mu: 1.0,
            kappa: 1.0,
            p_minus: None,
            delta: None,
            v_plus: 1.0,
            u_plus: 0.0,
            theta_plus: 1.0,
            density_kind: DensityName::Boltzmann,
            gamma_e: 2.0,
            a_e: 1.0,
        }
    }
}

pub const DEFAULT_DELTA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FarField {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub dt_initial: f64,
    /// When set, the step is `dt_over_h * h` instead of `dt_initial`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_over_h: Option<f64>,
    pub t_end: f64,
    pub cadence: f64,
    pub theta_scheme: f64,
    pub far_field_bc: FarField,
    pub newton_tol: f64,
    pub newton_max: usize,
    pub cfl_safety: f64,
    pub xi_max: f64,
    pub n_nodes: usize,
    pub delta_cap: f64,
    pub correction_sweeps: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        let solver = SolverConfig::default();
        let profile = SelfSimilarNumerics::default();
        Self {
            l: 40.0,
            n: 1024,
            dt_initial: solver.dt,
            dt_over_h: None,
            t_end: 10.0,
            cadence: 0.5,
            theta_scheme: solver.theta_scheme,
            far_field_bc: FarField::Dirichlet,
            newton_tol: solver.newton_tol,
            newton_max: solver.newton_max,
            cfl_safety: solver.cfl_safety,
            xi_max: profile.xi_max,
            n_nodes: profile.n_nodes,
            delta_cap: profile.delta_cap,
            correction_sweeps: profile.correction_sweeps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Gaussian,
    Compact,
}

/// One sweep axis: a dotted parameter path and its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Experiment {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    /// Perturbation amplitude.
    pub eps: f64,
    pub bump_center: f64,
    pub bump_width: f64,
    pub bump_shape: Shape,
    /// Weights of the bump in `v`, `u` and `theta`.
    pub bump_weights: [f64; 3],
    /// Sample times for the profile decay fits.
    pub times: Vec<f64>,
    /// Time at which sweep points are evaluated.
    pub probe_time: f64,
    pub sweep: Vec<SweepAxis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub seed: String,
    pub workers: usize,
    /// Tolerance overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for Experiment {
    fn default() -> Self {
        Self {
            kind: None,
            eps: 1e-2,
            bump_center: 16.0,
            bump_width: 2.0,
            bump_shape: Shape::Gaussian,
            bump_weights: [1.0, 1.0, 1.0],
            times: vec![1.0, 4.0, 16.0, 64.0],
            probe_time: 1.0,
            sweep: Vec::new(),
            output_dir: None,
            seed: String::new(),
            workers: 1,
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub physics: Physics,
    pub numerics: Numerics,
    pub experiment: Experiment,
}

/// Reads, overrides and validates a configuration file.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string(), overrides)
}

/// As [`load_config`] on in-memory text; `origin` labels parse errors.
pub fn parse_config(text: &str, origin: &str, overrides: &[String]) -> Result<ExperimentConfig> {
    let parse_error = |e: toml::de::Error| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        HarnessError::Parse {
            path: origin.to_string(),
            line,
            column,
            message: e.message().to_string(),
        }
    };
    // Typed parse first so that errors carry source positions.
    let mut cfg: ExperimentConfig = toml::from_str(text).map_err(parse_error)?;
    if !overrides.is_empty() {
        let mut table: toml::Table = toml::from_str(text).map_err(parse_error)?;
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("override `{item}` is not of the form key=value")))?;
            set_path(&mut table, key.trim(), parse_value(raw.trim()))?;
        }
        cfg = from_table(table)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

/// A TOML literal if it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("x = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("x"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let Some((section, key)) = path.split_once('.') else {
        return Err(HarnessError::Config(format!("parameter `{path}` must be written as section.key")));
    };
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let toml::Value::Table(inner) = entry else {
        return Err(HarnessError::Config(format!("`{section}` is not a section")));
    };
    inner.insert(key.to_string(), value);
    Ok(())
}

fn from_table(table: toml::Table) -> Result<ExperimentConfig> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| HarnessError::Config(e.message().to_string()))
}

/// Renders a sweep value for directory names and summaries.
pub fn value_label(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Float(x) => format!("{x}"),
        other => other.to_string(),
    }
}

/// One configuration of a sweep together with its directory name.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub name: String,
    pub assignments: Vec<(String, String)>,
    pub config: std::result::Result<ExperimentConfig, String>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let p = &self.physics;
        let n = &self.numerics;
        let e = &self.experiment;
        self.gas().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if p.p_minus.is_some() && p.delta.is_some() {
            return Err(HarnessError::Config("physics.p_minus and physics.delta are mutually exclusive".into()));
        }
        if let Some(d) = p.delta {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(HarnessError::Config(format!("delta must be nonnegative, got {d}")));
            }
        }
        for (name, value) in [("v_plus", p.v_plus), ("theta_plus", p.theta_plus), ("A_e", p.a_e)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(HarnessError::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if !p.u_plus.is_finite() {
            return Err(HarnessError::Config("u_plus must be finite".into()));
        }
        self.model()?;
        self.grid()?;
        self.solver_config().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.profile_numerics().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(r) = n.dt_over_h {
            if !(r > 0.0 && r.is_finite()) {
                return Err(HarnessError::Config(format!("dt_over_h must be positive, got {r}")));
            }
        }
        self.perturbation().validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        if e.times.len() < 2 || e.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(HarnessError::Config("experiment.times needs at least two nonnegative times".into()));
        }
        if !(e.probe_time >= 0.0 && e.probe_time.is_finite()) {
            return Err(HarnessError::Config("probe_time must be nonnegative".into()));
        }
        if e.workers == 0 {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        for axis in &e.sweep {
            if axis.values.is_empty() {
                return Err(HarnessError::Config(format!("sweep over {} has no values", axis.param)));
            }
            if axis.param.starts_with("experiment.") {
                return Err(HarnessError::Config(format!("cannot sweep over {}", axis.param)));
            }
            // The parameter must exist: assigning the first value has to type-check.
            let mut table = self.to_table();
            set_path(&mut table, &axis.param, axis.values[0].clone())?;
            from_table(table)
                .map_err(|err| HarnessError::Config(format!("sweep axis {}: {err}", axis.param)))?;
        }
        Ok(())
    }

    fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("configuration serializes to a table")
    }

    /// Canonical TOML of the configuration with all defaults filled.
    pub fn resolved_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 over the seed, the crate version and the resolved configuration.
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.experiment.seed.as_bytes());
        h.update(b"\n");
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(b"\n");
        h.update(self.resolved_toml().as_bytes());
        hex::encode(h.finalize())
    }

    pub fn gas(&self) -> GasParams {
        GasParams {
            r: self.physics.r,
            gamma: self.physics.gamma,
            mu: self.physics.mu,
            kappa: self.physics.kappa,
        }
    }

    pub fn model(&self) -> Result<ElectronDensityModel> {
        let p = &self.physics;
        let m = match p.density_kind {
            DensityName::Boltzmann => ElectronDensityModel::boltzmann(p.a_e),
            DensityName::Generalized => ElectronDensityModel::generalized(p.gamma_e, p.a_e),
        };
        m.map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn right_state(&self) -> RightState {
        RightState {
            v_plus: self.physics.v_plus,
            u_plus: self.physics.u_plus,
            theta_plus: self.physics.theta_plus,
        }
    }

    pub fn closure(&self) -> Result<QuasineutralClosure> {
        let model = self.model()?;
        let gas = self.gas();
        let ends = match self.physics.p_minus {
            Some(p) => QuasineutralClosure::solve_left_state(self.right_state(), p, &model, &gas)?,
            None => {
                let theta_minus = self.physics.theta_plus + self.physics.delta.unwrap_or(DEFAULT_DELTA);
                QuasineutralClosure::from_theta_minus(self.right_state(), theta_minus, &model, &gas)?
            }
        };
        Ok(QuasineutralClosure::new(ends, model, gas)?)
    }

    pub fn profile_numerics(&self) -> SelfSimilarNumerics {
        let n = &self.numerics;
        SelfSimilarNumerics {
            xi_max: n.xi_max,
            n_nodes: n.n_nodes,
            newton_tol: 1e-10,
            max_iter: 50,
            delta_cap: n.delta_cap,
            correction_sweeps: n.correction_sweeps,
        }
    }

    pub fn wave(&self) -> Result<ContactWaveField> {
        let c = self.closure()?;
        Ok(ContactWaveField::build(c.ends, c.model, c.gas, &self.profile_numerics())?)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.numerics.l, self.numerics.n).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        let n = &self.numerics;
        let dt = match n.dt_over_h {
            Some(r) => r * n.l / n.n as f64,
            None => n.dt_initial,
        };
        SolverConfig {
            dt,
            t_end: n.t_end,
            theta_scheme: n.theta_scheme,
            newton_tol: n.newton_tol,
            newton_max: n.newton_max,
            far_field_bc: match n.far_field_bc {
                FarField::Dirichlet => FarFieldBc::Dirichlet,
                FarField::Neumann => FarFieldBc::NeumannZero,
            },
            cfl_safety: n.cfl_safety,
            cadence: n.cadence,
        }
    }

    pub fn perturbation(&self) -> Perturbation {
        let e = &self.experiment;
        Perturbation {
            amplitude: e.eps,
            center: e.bump_center,
            width: e.bump_width,
            shape: match e.bump_shape {
                Shape::Gaussian => BumpShape::Gaussian,
                Shape::Compact => BumpShape::Compact,
            },
            weights: e.bump_weights,
        }
    }

    /// The Cartesian product of the sweep axes, first axis outermost. Without
    /// axes there is a single point named `base`. Invalid points are kept
    /// with their error so that they fail in isolation.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let mut combos: Vec<Vec<(String, toml::Value)>> = vec![Vec::new()];
        for axis in &self.experiment.sweep {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    axis.values.iter().map(move |v| {
                        let mut next = c.clone();
                        next.push((axis.param.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }
        combos
            .into_iter()
            .map(|assign| {
                let mut table = self.to_table();
                if let Some(toml::Value::Table(exp)) = table.get_mut("experiment") {
                    exp.remove("sweep");
                }
                let mut labelled = Vec::new();
                for (param, value) in &assign {
                    labelled.push((param.clone(), value_label(value)));
                    set_path(&mut table, param, value.clone()).expect("sweep axes are validated");
                }
                let config = from_table(table)
                    .and_then(|c| c.validate().map(|_| c))
                    .map_err(|e| e.to_string());
                let name = if labelled.is_empty() {
                    "base".to_string()
                } else {
                    labelled.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
                };
                SweepPoint {
                    name,
                    assignments: labelled,
                    config,
                }
            })
            .collect()
    }
}
