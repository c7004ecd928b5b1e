use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator, the closed forms and the experiment layer.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (zero distance, empty region, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two inputs that must share a length or grid do not.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The experiment file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The experiment file parsed but a field holds an invalid value.
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn invalid(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
