use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("only odd primes are supported, got {0}")]
    UnsupportedPrime(u64),

    #[error("precision must be at least 1, got {0}")]
    InvalidPrecision(i64),

    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("precision exhausted in {operation} (remaining precision {remaining})")]
    PrecisionExhausted { operation: String, remaining: i64 },

    #[error("{0} lies outside the disc 1 + pZ_p")]
    OutsideDisc(String),

    #[error("value is not a p-adic integer: {0}")]
    NotIntegral(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("need at least {needed} sample points, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("argument overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, PadicError>;
