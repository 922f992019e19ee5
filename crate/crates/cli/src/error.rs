use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] pmlkit::Error),

    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write report: {0}")]
    Write(#[from] std::io::Error),

    #[error("{path}: {source}")]
    File { path: PathBuf, source: pmlkit::Error },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("grid check failed: {0}")]
    GridCheck(pmlkit::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) | CliError::File { source: e, .. } if e.is_capacity() => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
