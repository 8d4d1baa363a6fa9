use thiserror::Error;

/// Errors raised across the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p not prime: {0}")]
    NotPrime(u64),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("continued fraction has only {available} partial quotients, needed {needed}")]
    InsufficientTerms { available: usize, needed: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("period re-detection failed after {0} steps")]
    PeriodDetection(usize),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn precision(msg: impl Into<String>) -> Self {
        Error::PrecisionExhausted(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::PrecisionExhausted(_) | Error::InsufficientTerms { .. } => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
