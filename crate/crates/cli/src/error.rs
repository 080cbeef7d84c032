use std::path::Path;

use thiserror::Error;

/// Failures of a command, each with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] binfwd::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 I/O, 2 validation, 3 budget refusal, 4 nothing feasible.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Core(binfwd::Error::Io(_)) => 1,
            CliError::Core(binfwd::Error::Budget { .. }) => 3,
            CliError::Core(binfwd::Error::Infeasible { .. }) => 4,
            CliError::Validation(_) | CliError::Core(_) => 2,
        }
    }
}
