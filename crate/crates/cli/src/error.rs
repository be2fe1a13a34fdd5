use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("{failed} of {total} runs failed")]
    Partial { failed: usize, total: usize },

    #[error("malformed run store {path}: {message}")]
    Store { path: String, message: String },

    #[error(transparent)]
    Core(#[from] lenia_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn store(path: &Path, message: impl Into<String>) -> Self {
        CliError::Store { path: path.display().to_string(), message: message.into() }
    }

    pub(crate) fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Config { line, message } => CliError::Config { line, message: format!("{}: {message}", path.display()) },
            other => other,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Partial { .. } => 3,
            _ => 1,
        }
    }
}
