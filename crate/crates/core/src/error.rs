use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid spin value {value} at position {position}; entries must be -1 or +1")]
    InvalidSpin { position: usize, value: i64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension {d} exceeds the enumeration cap of {cap}")]
    EnumerationCap { d: usize, cap: usize },

    #[error("index {index} out of range for dimension {d}")]
    IndexOutOfRange { index: usize, d: usize },

    #[error("data set is empty")]
    EmptyData,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("information matrix is singular or ill-conditioned (condition number {condition:.3e}); offending coordinates: {coordinates:?}")]
    IllConditioned { condition: f64, coordinates: Vec<usize> },

    #[error("standard error at index {index} must be positive, got {value}")]
    NonPositiveStandardError { index: usize, value: f64 },

    #[error("p-value at index {index} is outside [0, 1]: {value}")]
    PValueOutOfRange { index: usize, value: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("split vote for party {party} in division {date} #{number} has no member-level records")]
    UnresolvedSplit { party: String, date: String, number: u32 },

    #[error("column {0:?} not found")]
    MissingColumn(String),

    #[error("table still contains {kind} cell at division {row}, column {column:?}")]
    IncompleteTable { kind: &'static str, row: usize, column: String },

    #[error("cannot impute row {row}, column {column}: no rows observe this column")]
    Unimputable { row: usize, column: usize },

    #[error("non-finite value cannot be serialized")]
    NonFinite,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures that stem from the numerics rather than from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::IllConditioned { .. } | Error::NonFinite)
    }
}
