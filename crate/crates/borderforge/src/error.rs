use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is out of range (need 2 <= p < 2^31)")]
    ModulusOutOfRange(u64),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("exponent overflow (max {max} per variable)")]
    ExponentOverflow { max: u32 },
    #[error("too many variables: {0} (max {max})", max = crate::algebra::MAX_VARS)]
    TooManyVariables(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("term set is not an order ideal")]
    NotAnOrderIdeal,
    #[error("duplicate leading term {0}")]
    DuplicateLeadingTerm(String),
    #[error("no generator with leading term {0} for the border")]
    MissingBorderGenerator(String),
    #[error("universe degree {degree} exceeds the cap {cap}")]
    DegreeBudgetExceeded { degree: u32, cap: u32 },
    #[error("oracle unavailable: {0}")]
    OracleUnavailable(String),
    #[error("order ideal sampling needs at least 2 variables, got {0}")]
    InvalidArity(usize),
    #[error("requested {requested} distinct points but only {available} exist")]
    TooManyPoints { requested: u128, available: u128 },
    #[error("evaluation matrix of the order ideal is singular")]
    RankDeficient,
    #[error("schema error on line {line}: {msg}")]
    Schema { line: usize, msg: String },
    #[error("variants disagree on instance {instance}: {detail}")]
    VariantDisagreement { instance: usize, detail: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
