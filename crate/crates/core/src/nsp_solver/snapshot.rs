//! Columnar text snapshots `x v u theta phi` with a `# key = value` header.

use std::io::{BufRead, Write};

use super::{FluidState, Grid};
use crate::error::{NspError, Result};

const COLUMNS: &str = "x v u theta phi";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub config_hash: String,
    pub x: Vec<f64>,
    pub state: FluidState,
}

pub fn write_snapshot<W: Write>(state: &FluidState, grid: &Grid, config_hash: &str, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| NspError::InvalidInput(format!("i/o error: {e}"));
    writeln!(out, "# t = {:e}", state.t).map_err(io)?;
    writeln!(out, "# config_hash = {config_hash}").map_err(io)?;
    writeln!(out, "{COLUMNS}").map_err(io)?;
    for i in 0..state.len() {
        writeln!(
            out,
            "{:e} {:e} {:e} {:e} {:e}",
            grid.x(i),
            state.v[i],
            state.u[i],
            state.theta[i],
            state.phi[i]
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn read_snapshot<R: BufRead>(input: R) -> Result<Snapshot> {
    let mut t = None;
    let mut hash = None;
    let mut cols = [(); 5].map(|_| Vec::new());
    let mut header_seen = false;
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| NspError::InvalidInput(format!("i/o error: {e}")))?;
        let line = line.trim();
        let parse_err = |message: String| NspError::Parse { line: line_no, message };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest.split_once('=').ok_or_else(|| parse_err("header without '='".into()))?;
            match k.trim() {
                "t" => t = Some(v.trim().parse::<f64>().map_err(|e| parse_err(e.to_string()))?),
                "config_hash" => hash = Some(v.trim().to_string()),
                other => return Err(parse_err(format!("unknown header key {other}"))),
            }
            continue;
        }
        if !header_seen {
            if line.split_whitespace().collect::<Vec<_>>().join(" ") != COLUMNS {
                return Err(parse_err(format!("expected columns `{COLUMNS}`")));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(format!("expected 5 columns, found {}", fields.len())));
        }
        for (col, f) in cols.iter_mut().zip(fields) {
            col.push(f.parse::<f64>().map_err(|e| parse_err(format!("{f:?}: {e}")))?);
        }
    }
    let t = t.ok_or_else(|| NspError::Parse {
        line: 0,
        message: "missing t".into(),
    })?;
    let [x, v, u, theta, phi] = cols;
    Ok(Snapshot {
        t,
        config_hash: hash.unwrap_or_default(),
        x,
        state: FluidState { t, v, u, theta, phi },
    })
}
