//! Crate-wide error type.

use std::fmt;

/// Errors produced by validation, parsing, and size limits.
#[derive(Debug)]
pub enum Error {
    /// A numeric argument is outside its documented domain.
    InvalidParameter(String),
    /// Two bit vectors that must have equal length do not.
    LengthMismatch { left: usize, right: usize },
    /// Not enough measurements/devices for the requested statistic.
    InsufficientData(String),
    /// An exhaustive enumeration would exceed the configured size cap.
    SupportTooLarge { bits: u32, max_bits: u32 },
    /// A probability mass function does not sum to one.
    NotNormalized { sum: f64 },
    /// A hex-encoded bit vector could not be decoded.
    BadHex(String),
    Io(std::io::Error),
    Json(serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::LengthMismatch { left, right } => {
                write!(f, "bit-vector length mismatch: {left} vs {right}")
            }
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
            Error::SupportTooLarge { bits, max_bits } => {
                write!(f, "support of 2^{bits} words exceeds the 2^{max_bits} cap")
            }
            Error::NotNormalized { sum } => {
                write!(f, "probabilities sum to {sum}, expected 1")
            }
            Error::BadHex(msg) => write!(f, "bad hex encoding: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}
