use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator.
///
/// [`Error::exit_code`] maps each variant onto the process exit codes used by
/// the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error in {entity}: {message}")]
    Validation { entity: String, message: String },

    #[error("infeasible at {context}: {message}")]
    Infeasible { context: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(entity: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            entity: entity.into(),
            message: message.into(),
        }
    }

    pub(crate) fn infeasible(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Infeasible {
            context: context.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for malformed or invalid input, 2 for infeasibility, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Validation { .. } | Error::InvalidArgument(_) => 1,
            Error::Infeasible { .. } => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
