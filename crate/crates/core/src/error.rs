use thiserror::Error;

/// Errors raised by the arithmetic and linear-algebra layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operands live in different contexts")]
    ContextMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A quantity that decides the answer is zero to the working precision.
    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),

    #[error("slope factorization failed: {0}")]
    SlopeFactorizationFailed(String),

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("series does not converge: {0}")]
    Divergent(String),

    #[error("truncation order too small, need at least {needed}")]
    TruncationTooSmall { needed: usize },

    #[error("parse error: {0}")]
    Parse(String),

    /// Input failed validation; `field` points at the offending location.
    #[error("validation failed at `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), message: message.into() }
    }

    /// True for failures that may disappear at a higher working precision.
    pub fn is_precision_related(&self) -> bool {
        matches!(self, Error::PrecisionInsufficient(_) | Error::SlopeFactorizationFailed(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
