use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is missing, malformed or out of range.
    #[error("configuration error in `{key}`: {message}")]
    Config { key: String, message: String },

    /// Two arrays that must describe the same lattice have different lengths.
    #[error("dimension mismatch: expected {expected} sites, found {found}")]
    Dimension { expected: usize, found: usize },

    /// A shift would move amplitude off the end of the chain.
    #[error("boundary overflow: nonzero amplitude at edge site {site}")]
    BoundaryOverflow { site: usize },

    /// An analysis routine got data it cannot work with.
    #[error("invalid input: {0}")]
    Input(String),

    /// A power-law fit could not be performed.
    #[error("fit error: {0}")]
    Fit(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed data: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 1,
            _ => 2,
        }
    }
}
