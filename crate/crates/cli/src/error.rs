use std::path::Path;

use thiserror::Error;

/// Failures that end a run with exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] asymptospec::Error),
}

impl CliError {
    /// Prefixes the message with the config path.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            CliError::Validation(v) => {
                CliError::Validation(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect())
            }
            e => e,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
