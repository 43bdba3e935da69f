//! File formats, JSON reports, the shipped fixture table and the threaded
//! search driver behind the `cosetcr` command.

pub mod commands;
pub mod driver;
pub mod fixtures;
pub mod formats;
pub mod json;
pub mod report;

/// Failures that end a command; each maps to an exit code.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Guard(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Guard(_) => 3,
        }
    }
}

impl From<cosetcr_core::Error> for CliError {
    fn from(e: cosetcr_core::Error) -> Self {
        match e {
            cosetcr_core::Error::Guard { .. } => CliError::Guard(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
