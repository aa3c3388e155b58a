use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine can report.
///
/// The variants map onto the broad classes callers care about: bad input
/// (`Parse`, `Validation`), misuse of an operation (`Contract`), lifecycle
/// problems of a run (`NotFound`, `Conflict`, `Phase`) and the outside world
/// (`Transport`, `Io`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("embedding provider transport error: {0}")]
    Transport(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("operation not allowed in phase {phase}: {message}")]
    Phase { phase: String, message: String },

    #[error("corrupt state file {path}: {message}")]
    CorruptState { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Short machine-readable code, used by the service and the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse_error",
            Error::Validation(_) => "validation_error",
            Error::Contract(_) => "contract_violation",
            Error::Transport(_) => "transport_error",
            Error::NotFound(_) => "not_found",
            Error::Conflict(_) => "conflict",
            Error::Phase { .. } => "invalid_phase",
            Error::CorruptState { .. } => "corrupt_state",
            Error::Io { .. } => "io_error",
        }
    }
}
