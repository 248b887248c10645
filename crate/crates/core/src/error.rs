//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by configuration, data generation, I/O, and the
/// session protocol.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty {0}")]
    EmptyInput(&'static str),

    #[error("non-finite component in feature vector")]
    NonFiniteComponent,

    #[error("zero-norm feature at index {0}")]
    ZeroNormFeature(usize),

    #[error("degenerate prototype for class {0}")]
    DegeneratePrototype(usize),

    #[error("class {0} already registered")]
    DuplicateClass(usize),

    #[error("no samples for class {0}")]
    MissingClass(usize),

    #[error("unknown class {0}")]
    UnknownClass(usize),

    #[error("insufficient class budget: need {needed} classes, have {available}")]
    ClassBudget { needed: usize, available: usize },

    #[error("session index mismatch: expected {expected}, got {actual}")]
    SessionIndex { expected: usize, actual: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing key: {0}")]
    MissingKey(String),

    #[error("duplicate key: {0}")]
    DuplicateKey(String),

    #[error("unknown key: {0}")]
    UnknownKey(String),

    #[error("covariance not repairable: {0}")]
    CovarianceNotRepairable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
