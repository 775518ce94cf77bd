use std::fmt;
use std::io;
use std::path::PathBuf;

/// Errors produced by sketch construction, stream ingestion and the
/// experiment harness.
#[derive(Debug)]
pub enum Error {
    /// A constructor or runner argument violates its contract.
    InvalidParameter {
        param: &'static str,
        value: String,
        constraint: &'static str,
    },
    /// File could not be read or written.
    Io { path: PathBuf, source: io::Error },
    /// A stream or CSV file has a line that does not parse.
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    /// A CSV input is missing required columns.
    Schema(String),
    /// A metric is undefined for the given input (e.g. zero total weight).
    UndefinedMetric(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                param,
                value,
                constraint,
            } => write!(f, "invalid parameter {param}={value}: {constraint}"),
            Error::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Error::Parse {
                path,
                line,
                message,
            } => write!(f, "{}:{line}: {message}", path.display()),
            Error::Schema(msg) => write!(f, "bad csv schema: {msg}"),
            Error::UndefinedMetric(msg) => write!(f, "undefined metric: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
