//! CLI-level errors and their mapping onto process exit codes.

use std::path::PathBuf;

/// Exit code for a certification whose margins fall below tolerance.
pub const EXIT_CERTIFICATION_FAILURE: i32 = 1;
/// Exit code for usage, configuration, file-format, and solver errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] geodescent::Error),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Every [`CliError`] is a usage/config/runtime problem, never a
    /// certification verdict.
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
