use thiserror::Error;

/// Errors produced by the partition, point-code and metric routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The partition construction could not satisfy one of its invariants.
    #[error("construction error: {0}")]
    Construction(String),

    /// Two points of a code coincide, so a singular energy is infinite.
    #[error("points {first} and {second} coincide; energy is infinite")]
    CoincidentPoints { first: usize, second: usize },

    /// A generator, metric or option combination that cannot be honoured.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested operation is not defined for this dimension.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Malformed input data (files, serialized trees).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Serialization failure.
    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
