//! Ground-truth enumeration, Monte Carlo experiments, the acceptance suite
//! and the `fringe` command line on top of `fringe-core`.

pub mod acceptance;
pub mod approx;
pub mod classes;
pub mod cli;
pub mod config;
pub mod limit;
pub mod oracle;
pub mod report;

use fringe_core::error::Error as CoreError;

/// Errors of the experiment layer. Capacity violations are kept apart so
/// the command line can map them to their own exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Capacity(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Capacity(m) => LabError::Capacity(m),
            other => LabError::Invalid(other.to_string()),
        }
    }
}

impl LabError {
    /// Process exit code: 3 for capacity violations, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Capacity(_) => 3,
            _ => 2,
        }
    }
}
