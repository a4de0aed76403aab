use thiserror::Error;

/// Failures raised by the physics and solver modules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum NspError {
    #[error("{what} = {value} lies outside the admissible interval ({lo}, {hi})")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no admissible left state: p_minus = {p_minus} must lie in ({lo}, {hi})")]
    NoBracket { p_minus: f64, lo: f64, hi: f64 },

    #[error("root bracketing failed for {context}")]
    BracketFailure { context: String },

    #[error("Newton iteration for {context} did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence {
        context: String,
        iterations: usize,
        residual: f64,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{field} became nonpositive at node {index} (value {value:e}, t = {t})")]
    Positivity {
        field: &'static str,
        index: usize,
        value: f64,
        t: f64,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, NspError>;
