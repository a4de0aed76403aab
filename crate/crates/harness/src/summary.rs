//! Checks and machine-readable summaries.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|measured - target| <= tolerance`.
    Within,
    /// `measured <= target + tolerance`.
    AtMost,
    /// `measured >= target - tolerance`.
    AtLeast,
    /// `measured < target`.
    Below,
    /// `measured > target`.
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A measured value compared with a target. A non-finite measurement fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub verdict: Verdict,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, target: f64, tolerance: f64, relation: Relation) -> Self {
        let mut c = Self {
            check: name.into(),
            measured,
            target,
            tolerance,
            relation,
            verdict: Verdict::Fail,
        };
        c.decide();
        c
    }

    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self::new(name, measured, target, tolerance, Relation::Within)
    }

    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, bound, 0.0, Relation::AtMost)
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, bound, 0.0, Relation::AtLeast)
    }

    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, bound, 0.0, Relation::Below)
    }

    pub fn above(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(name, measured, bound, 0.0, Relation::Above)
    }

    fn decide(&mut self) {
        let (m, t, tol) = (self.measured, self.target, self.tolerance);
        let ok = m.is_finite()
            && match self.relation {
                Relation::Within => (m - t).abs() <= tol,
                Relation::AtMost => m <= t + tol,
                Relation::AtLeast => m >= t - tol,
                Relation::Below => m < t,
                Relation::Above => m > t,
            };
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Replaces the tolerance and re-evaluates the verdict.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.decide();
        self
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.check = format!("{prefix}/{}", self.check);
        self
    }
}

/// Applies tolerance overrides by check name.
pub fn apply_tolerances(checks: Vec<Check>, overrides: &BTreeMap<String, f64>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|c| match overrides.get(&c.check) {
            Some(&t) => c.with_tolerance(t),
            None => c,
        })
        .collect()
}

/// Outcome class of a sweep point or run, ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    CheckFailure,
    ConfigError,
    SolverFailure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::CheckFailure => 1,
            Self::ConfigError => 2,
            Self::SolverFailure => 3,
        }
    }

    pub fn from_checks(checks: &[Check]) -> Self {
        if checks.iter().all(Check::passed) {
            Self::Pass
        } else {
            Self::CheckFailure
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub kind: String,
    pub config_hash: String,
    pub status: Status,
    pub checks: Vec<Check>,
    pub points: Vec<PointSummary>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}
