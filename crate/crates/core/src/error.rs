//! Crate-wide error type.
//!
//! Errors split into two families that the CLI maps to exit codes:
//! configuration errors (exit 2) mean the tool was set up wrong and no
//! data-dependent verdict was reached; everything else is a domain error
//! (exit 1).

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: malformed JSON: {message}")]
    MalformedJsonl {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("repository list {path} contains zero valid entries")]
    ZeroValidEntries { path: PathBuf },

    #[error("method {name} not found in {unit} unit (detector/miner desync)")]
    MethodNotFound { name: String, unit: &'static str },

    #[error("version-control command failed: {0}")]
    Vcs(String),

    #[error("distribution support mismatch: {0}")]
    SupportMismatch(String),

    #[error("token {0:?} is not in the vocabulary")]
    UnknownToken(String),

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
