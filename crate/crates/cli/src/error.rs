use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] multirec_core::Error),

    #[error("usage: {0}")]
    Usage(String),

    #[error("fixture missing: {}", .0.display())]
    FixtureMissing(PathBuf),

    #[error("bad fixture {}: {reason}", .path.display())]
    BadFixture { path: PathBuf, reason: String },

    #[error("i/o error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
