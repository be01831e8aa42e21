use thiserror::Error;

/// A violated invariant, naming the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {reason}")]
pub struct ValidationError {
    pub field: String,
    pub reason: String,
}

impl ValidationError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

impl From<serde_json::Error> for ScenarioError {
    fn from(e: serde_json::Error) -> Self {
        ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    /// The parallel drive-out needed more arc pairs than allowed, or the spot
    /// is shorter than the body plus clearance on both ends.
    #[error("parking spot is infeasible: {0}")]
    InfeasibleSpot(String),
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("no path found after {iterations} iterations")]
    NoPathFound { iterations: u64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("tracking diverged: cross-track error {cross_track:.3} m at t = {t:.2} s")]
    Diverged { t: f64, cross_track: f64 },
    #[error("reference path is empty")]
    EmptyPath,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}
