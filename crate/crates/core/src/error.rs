use std::fmt;
use std::io;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug)]
pub enum Error {
    /// An argument had to be prime.
    NotPrime(u64),
    /// An argument had to be a prime power.
    NotPrimePower(u64),
    /// Operands belong to different fields.
    FieldMismatch,
    /// Multiplicative inverse of zero requested.
    DivisionByZero,
    /// An argument lies outside the documented domain.
    Domain(String),
    /// A generator describes a degenerate code (duplicate evaluation points,
    /// too few of them, ...).
    DegenerateCode(String),
    /// Generator rows are linearly dependent.
    RankDeficient(String),
    /// A construction needs the all-one codeword and it is absent.
    MissingAllOne(String),
    /// Pattern alphabet and primary columns do not correspond.
    Correspondence(String),
    /// Coset reduction could not pick representatives.
    Reduction(String),
    /// Matrix shapes are incompatible.
    Dimension(String),
    /// A consistency check on constructed data failed.
    Validation(String),
    Io(io::Error),
    Json(serde_json::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(n) => write!(f, "{n} is not prime"),
            Error::NotPrimePower(n) => write!(f, "{n} is not a prime power"),
            Error::FieldMismatch => write!(f, "field elements come from different fields"),
            Error::DivisionByZero => write!(f, "division by zero in a finite field"),
            Error::Domain(msg)
            | Error::DegenerateCode(msg)
            | Error::RankDeficient(msg)
            | Error::MissingAllOne(msg)
            | Error::Correspondence(msg)
            | Error::Reduction(msg)
            | Error::Dimension(msg)
            | Error::Validation(msg) => write!(f, "{msg}"),
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

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}
