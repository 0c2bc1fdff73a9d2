use thiserror::Error;

/// Errors raised by the library layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("torsion entries must be >= 2 (got {0})")]
    Torsion(String),

    #[error("invalid monoid: {0}")]
    Monoid(String),

    #[error("symbolic closure not available for {atom}: {reason}")]
    SymbolicClosure { atom: String, reason: String },

    #[error("compactness undecidable for atom {atom}: {reason}")]
    UndecidableShape { atom: String, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("enumeration capped at {cap} points (requested {requested})")]
    Cap { cap: usize, requested: usize },

    #[error("point {point} out of range for ground set of size {size}")]
    OutOfRange { point: usize, size: usize },

    #[error("malformed certificate: {0}")]
    Structural(String),
}

pub type Result<T> = std::result::Result<T, Error>;
