//! Job schema, dispatcher, reports and the acceptance battery behind the
//! `tate-forge` binary.

pub mod encode;
pub mod ops;
pub mod report;
pub mod schema;
pub mod suite;

use tate_forge::Error;

/// Failure of a single job, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum JobError {
    /// Malformed or out-of-bounds input: exit code 2, no report.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl JobError {
    /// Whether the failure is a broken structural invariant of the input data
    /// (reported with exit code 1) rather than a rejected request.
    pub fn is_violation(&self) -> bool {
        matches!(
            self,
            JobError::Core(
                Error::InvalidComplex(_)
                    | Error::NotChainMap(_)
                    | Error::NotAModule(_)
                    | Error::NotARepresentation(_)
                    | Error::LieAxiomViolation { .. }
                    | Error::InvalidCdga(_)
            )
        )
    }
}

pub type JobResult<T> = std::result::Result<T, JobError>;

pub fn input_error(msg: impl Into<String>) -> JobError {
    JobError::Input(msg.into())
}
