use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by the command line to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error at byte {offset} ({pointer}): {message}")]
    Parse {
        path: PathBuf,
        offset: usize,
        pointer: String,
        message: String,
    },

    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },

    #[error("{0}")]
    Data(String),

    #[error("curve fit did not converge: residual rms {rms:.4} (a={a:.4}, b={b:.4})")]
    FitNotConverged { a: f64, b: f64, rms: f64 },
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Usage(_) => ErrorKind::Usage,
            Error::Io { .. } => ErrorKind::Io,
            Error::Parse { .. }
            | Error::Image { .. }
            | Error::Data(_)
            | Error::FitNotConverged { .. } => ErrorKind::Data,
        }
    }
}
