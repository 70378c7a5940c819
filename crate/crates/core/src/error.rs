use std::path::PathBuf;

use crate::solver::NewtonReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{kind} id {id} out of range (count {count})")]
    IdOutOfRange {
        kind: &'static str,
        id: usize,
        count: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid problem parameter: {0}")]
    Parameter(String),

    #[error("non-finite data value at {location}")]
    DataEvaluation { location: String },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("meshes are not nested: {0}")]
    Nesting(String),

    #[error("stale data: {0}")]
    Consistency(String),

    #[error("linear solve failed: {reason}")]
    SolverFailure { reason: String },

    #[error(
        "Newton did not converge after {} iterations (last increment {:e})",
        .report.iterations,
        .report.increment_norms.last().copied().unwrap_or(f64::NAN)
    )]
    NonConvergence { report: Box<NewtonReport> },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
