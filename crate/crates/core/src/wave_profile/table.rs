//! Columnar text serialization of a converged wave.
//!
//! Header lines start with `#` and carry `key = value` pairs; the data block
//! has the columns `xi theta dtheta f fprime g`. Floats are written in the
//! shortest form that parses back to the same value.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::closure::QuasineutralClosure;
use super::field::ContactWaveField;
use super::self_similar::SelfSimilarProfile;
use super::{GasParams, RiemannEndStates};
use crate::electron_density::{DensityKind, ElectronDensityModel};
use crate::error::{NspError, Result};

const FORMAT: &str = "nsp-profile-1";
const COLUMNS: [&str; 6] = ["xi", "theta", "dtheta", "f", "fprime", "g"];

fn io_err(e: std::io::Error) -> NspError {
    NspError::InvalidInput(format!("i/o error: {e}"))
}

pub fn write_profile_table<W: Write>(field: &ContactWaveField, mut out: W) -> Result<()> {
    let e = field.ends();
    let gas = field.gas();
    let p = field.profile();
    let mut header: Vec<(&str, String)> = vec![("format", FORMAT.to_string())];
    match field.model().kind() {
        DensityKind::Boltzmann { a_e } => {
            header.push(("density_kind", "boltzmann".into()));
            header.push(("a_e", format!("{a_e:e}")));
        }
        DensityKind::Generalized { gamma_e, a_e } => {
            header.push(("density_kind", "generalized".into()));
            header.push(("gamma_e", format!("{gamma_e:e}")));
            header.push(("a_e", format!("{a_e:e}")));
        }
    }
    for (k, v) in [
        ("r", gas.r),
        ("gamma", gas.gamma),
        ("mu", gas.mu),
        ("kappa", gas.kappa),
        ("v_minus", e.v_minus),
        ("v_plus", e.v_plus),
        ("u_minus", e.u_minus),
        ("u_plus", e.u_plus),
        ("theta_minus", e.theta_minus),
        ("theta_plus", e.theta_plus),
        ("phi_minus", e.phi_minus),
        ("phi_plus", e.phi_plus),
        ("p_minus", e.p_minus),
        ("delta", e.delta),
        ("residual_norm", p.residual_norm),
    ] {
        header.push((k, format!("{v:e}")));
    }
    header.push(("newton_iterations", p.newton_iterations.to_string()));
    for (k, v) in header {
        writeln!(out, "# {k} = {v}").map_err(io_err)?;
    }
    writeln!(out, "{}", COLUMNS.join(" ")).map_err(io_err)?;
    let (v, fp, g) = (field.v_nodes(), field.f_prime_nodes(), field.g_nodes());
    for j in 0..p.xi_grid.len() {
        writeln!(
            out,
            "{:e} {:e} {:e} {:e} {:e} {:e}",
            p.xi_grid[j], p.theta[j], p.dtheta[j], v[j], fp[j], g[j]
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| NspError::Parse {
        line,
        message: format!("bad number {s:?}: {e}"),
    })
}

/// Reads a table written by [`write_profile_table`] and rebuilds the wave.
/// The derived columns are checked against the rebuilt closure.
pub fn read_profile_table<R: BufRead>(input: R) -> Result<ContactWaveField> {
    let mut header = BTreeMap::new();
    let mut rows: Vec<[f64; 6]> = Vec::new();
    let mut seen_columns = false;
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(io_err)?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            let (k, v) = rest.split_once('=').ok_or_else(|| NspError::Parse {
                line: lineno,
                message: "header line without '='".into(),
            })?;
            if header.insert(k.trim().to_string(), (v.trim().to_string(), lineno)).is_some() {
                return Err(NspError::Parse {
                    line: lineno,
                    message: format!("duplicate header key {}", k.trim()),
                });
            }
            continue;
        }
        if !seen_columns {
            let cols: Vec<&str> = trimmed.split_whitespace().collect();
            if cols != COLUMNS {
                return Err(NspError::Parse {
                    line: lineno,
                    message: format!("expected columns {:?}", COLUMNS),
                });
            }
            seen_columns = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(NspError::Parse {
                line: lineno,
                message: format!("expected 6 columns, found {}", fields.len()),
            });
        }
        let mut row = [0.0; 6];
        for (slot, f) in row.iter_mut().zip(&fields) {
            *slot = parse_f64(f, lineno)?;
        }
        rows.push(row);
    }
    let get = |k: &str| -> Result<(String, usize)> {
        header.get(k).cloned().ok_or_else(|| NspError::Parse {
            line: 0,
            message: format!("missing header key {k}"),
        })
    };
    let num = |k: &str| -> Result<f64> {
        let (v, line) = get(k)?;
        parse_f64(&v, line)
    };
    if get("format")?.0 != FORMAT {
        return Err(NspError::Parse {
            line: get("format")?.1,
            message: format!("unsupported format, expected {FORMAT}"),
        });
    }
    let model = match get("density_kind")?.0.as_str() {
        "boltzmann" => ElectronDensityModel::boltzmann(num("a_e")?)?,
        "generalized" => ElectronDensityModel::generalized(num("gamma_e")?, num("a_e")?)?,
        other => {
            return Err(NspError::Parse {
                line: get("density_kind")?.1,
                message: format!("unknown density kind {other}"),
            })
        }
    };
    let gas = GasParams {
        r: num("r")?,
        gamma: num("gamma")?,
        mu: num("mu")?,
        kappa: num("kappa")?,
    };
    let ends = RiemannEndStates {
        v_minus: num("v_minus")?,
        v_plus: num("v_plus")?,
        u_minus: num("u_minus")?,
        u_plus: num("u_plus")?,
        theta_minus: num("theta_minus")?,
        theta_plus: num("theta_plus")?,
        phi_minus: num("phi_minus")?,
        phi_plus: num("phi_plus")?,
        p_minus: num("p_minus")?,
        delta: num("delta")?,
    };
    let (iters, iters_line) = get("newton_iterations")?;
    let newton_iterations = iters.parse::<usize>().map_err(|e| NspError::Parse {
        line: iters_line,
        message: e.to_string(),
    })?;
    let profile = SelfSimilarProfile {
        xi_grid: rows.iter().map(|r| r[0]).collect(),
        theta: rows.iter().map(|r| r[1]).collect(),
        dtheta: rows.iter().map(|r| r[2]).collect(),
        kappa: gas.kappa,
        residual_norm: num("residual_norm")?,
        newton_iterations,
    };
    let closure = QuasineutralClosure::new(ends, model, gas)?;
    let field = ContactWaveField::new(closure, profile)?;
    for (j, r) in rows.iter().enumerate() {
        let stored = [r[3], r[4], r[5]];
        let rebuilt = [field.v_nodes()[j], field.f_prime_nodes()[j], field.g_nodes()[j]];
        if stored != rebuilt {
            return Err(NspError::Invariant(format!(
                "derived columns at node {j} disagree with the rebuilt closure"
            )));
        }
    }
    Ok(field)
}
