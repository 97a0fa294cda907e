use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const NUMERIC: u8 = 4;
    pub const DATA_FORMAT: u8 = 5;
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    /// Malformed line in a dataset or points file (1-based line number).
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("model file: {0}")]
    Model(String),
    /// Contents that parse but violate a dataset invariant.
    #[error("invalid data: {0}")]
    Data(multisurf_core::Error),
    #[error("{0}")]
    Numeric(multisurf_core::Error),
    /// Every row of a sweep failed.
    #[error("all {0} sweep rows failed")]
    SweepFailed(usize),
}

impl Error {
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) | Error::UnknownGenerator(_) => exit::USAGE,
            Error::Io { .. } => exit::IO,
            Error::Numeric(multisurf_core::Error::InvalidParameter(_)) => exit::USAGE,
            Error::Numeric(_) | Error::SweepFailed(_) => exit::NUMERIC,
            Error::Parse { .. } | Error::DimensionMismatch { .. } | Error::Model(_) | Error::Data(_) => exit::DATA_FORMAT,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}

impl From<multisurf_core::Error> for Error {
    fn from(e: multisurf_core::Error) -> Self {
        Error::Numeric(e)
    }
}
