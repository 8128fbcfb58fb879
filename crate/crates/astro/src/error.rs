//! Error type shared across the crate.

use crate::model::CounterKind;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid topology: at least one core must exist")]
    InvalidTopology,

    #[error("invalid {kind} counter value {value}: must be finite and non-negative")]
    InvalidCounter { kind: CounterKind, value: f64 },

    #[error("invalid interval {0}: must be positive and finite")]
    InvalidInterval(f64),

    #[error("invalid energy {0}: must be non-negative and finite")]
    InvalidEnergy(f64),

    #[error("invalid config id {id}: topology has {count} configurations")]
    InvalidConfigId { id: usize, count: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid function summary `{0}`: total_instr must be positive")]
    InvalidSummary(String),

    #[error("duplicate function name `{0}`")]
    DuplicateFunction(String),

    #[error("invalid network shape: {0}")]
    Shape(String),

    #[error("training batch is empty")]
    EmptyBatch,

    #[error("no action available for selection")]
    NoAction,

    #[error("invalid phase script: {0}")]
    PhaseScript(String),

    #[error("trace set: {0}")]
    Trace(String),

    #[error("missing trace file for config {0}")]
    MissingConfig(usize),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Line-number accessor used by tests and the CLI for parse diagnostics.
    pub fn parse_line(&self) -> Option<usize> {
        match self {
            Error::Parse { line, .. } => Some(*line),
            _ => None,
        }
    }
}
