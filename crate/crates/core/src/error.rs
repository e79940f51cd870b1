use thiserror::Error;

/// Errors produced by ingestion, clustering and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("ground truth is missing labels for {} node(s): {}", .0.len(), .0.join(", "))]
    MissingLabels(Vec<String>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input is empty")]
    Empty,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("graph is weighted; use the weighted (community-sum) modularity form")]
    WeightedGraph,

    #[error(
        "no convergence after {iterations} iterations (last sets: {previous:?} -> {current:?})"
    )]
    NonConvergence {
        iterations: usize,
        previous: Vec<usize>,
        current: Vec<usize>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Algorithm,
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Usage,
            Error::NonConvergence { .. } | Error::Invariant(_) => ErrorKind::Algorithm,
            _ => ErrorKind::Data,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
