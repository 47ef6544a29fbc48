use std::path::PathBuf;

use thiserror::Error;

use crate::io::Role;

/// Everything that stops a command before a verdict exists; all of these map
/// to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{}: schema error: {message}", path.display())]
    Schema { path: PathBuf, message: String },

    #[error("{}: not a valid {role}: {source}", path.display())]
    Invalid {
        path: PathBuf,
        role: Role,
        #[source]
        source: pcsft_core::Error,
    },

    #[error("{0}")]
    Core(#[from] pcsft_core::Error),

    #[error("{0}")]
    Usage(String),
}
