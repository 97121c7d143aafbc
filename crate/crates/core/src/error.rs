//! Crate-wide error type.
//!
//! Variants are grouped by how a caller should react; [`Error::exit_code`]
//! maps them onto the command-line exit codes.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing input file {0}")]
    MissingInput(PathBuf),

    #[error("format error: {0}")]
    Format(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rejected scene: {0}")]
    Scene(String),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 I/O, 3 format, 4 protocol violation, 5 degenerate data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::MissingInput(_)
            | Error::Format(_)
            | Error::Shape(_)
            | Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::Scene(_) => 3,
            Error::Protocol(_) => 4,
            Error::Degenerate(_) => 5,
        }
    }
}

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}
