//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by constructors and operations.
///
/// Validation failures carry enough context to name the violated
/// precondition; numerical failures indicate an internal computation that
/// could not be completed (degenerate geometry, failed bracketing).
#[derive(Debug, Error)]
pub enum ThermoconeError {
    /// Vector entries do not sum to one within `TOL_SUM`.
    #[error("entries sum to {sum}, expected 1 within {tol}")]
    NotNormalized { sum: f64, tol: f64 },

    /// An entry is more negative than the active tolerance allows.
    #[error("entry {index} is {value}, below the allowed minimum {min}")]
    NegativeEntry { index: usize, value: f64, min: f64 },

    /// Operands have incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A dimension guard was exceeded (e.g. d! enumeration or 2^d grids).
    #[error("dimension {dim} exceeds the supported maximum {max} for {what}")]
    DimensionGuard {
        dim: usize,
        max: usize,
        what: &'static str,
    },

    /// Inverse temperature must be non-negative (or the infinity flag).
    #[error("invalid inverse temperature {beta}")]
    InvalidBeta { beta: f64 },

    /// A parameter fell outside its documented domain.
    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// A numerical routine failed (degenerate geometry, no bracket, ...).
    #[error("numerical failure in {context}: {message}")]
    Numerical {
        context: &'static str,
        message: String,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, ThermoconeError>;
