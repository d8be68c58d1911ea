use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length {len} is not divisible by base {base}")]
    NotDivisible { len: usize, base: usize },

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("coordinate {index} precedes pivot {pivot} but is nonzero")]
    NonZeroBeforePivot { index: usize, pivot: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("{count} regression vectors exceed dimension {dimension}")]
    TooManyVectors { count: usize, dimension: usize },

    #[error("exponential overflow at index {0}")]
    Overflow(usize),

    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),

    #[error("Sobol dimension {requested} exceeds the direction table ({available} dimensions)")]
    DimensionUnavailable { requested: usize, available: usize },

    #[error("direction table, line {line}: {message}")]
    DirectionTable { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
