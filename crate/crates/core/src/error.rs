//! Crate-wide error type.
//!
//! Expected negative answers (no solution, not invertible, not isomorphic,
//! not in the closure) are encoded in return types, not here. `Error` is for
//! contract violations and resource limits: shape mismatches, malformed
//! inputs, and exceeded enumeration budgets.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("field mismatch: F_{left} against F_{right}")]
    FieldMismatch { left: u32, right: u32 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("{value} is not prime")]
    NotPrime { value: u32 },

    #[error("prime {value} exceeds the supported ceiling {ceiling}")]
    PrimeTooLarge { value: u32, ceiling: u32 },

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("representations live over different quivers")]
    QuiverMismatch,

    #[error("invalid representation: {0}")]
    InvalidRep(String),

    #[error("invalid morphism: {0}")]
    InvalidMor(String),

    #[error("enumeration of {count} elements exceeds the ceiling {ceiling}")]
    EnumerationTooLarge { count: u128, ceiling: u64 },

    #[error("isomorphism search budget exhausted after {samples} samples")]
    SearchBudgetExceeded { samples: u64 },

    #[error("dimension vector {dims:?} exceeds the universe bound {bound:?}")]
    OutOfBounds { dims: Vec<usize>, bound: Vec<usize> },

    #[error("estimated workload {estimate} exceeds the budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u64 },

    #[error("unknown iso-class id {id} (universe has {count} classes)")]
    UnknownClass { id: usize, count: usize },

    #[error("not a semibrick: {0}")]
    NotASemibrick(String),

    #[error("invalid subcategory candidate: {0}")]
    InvalidCandidate(String),

    #[error("ambient category is not length: {0}")]
    NotLength(String),

    #[error("invalid filtration certificate: {0}")]
    InvalidCertificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
