//! Crate-wide error type.
//!
//! Errors fall into two broad classes that callers (notably the CLI) treat
//! differently: *parameter* errors (a request that can never be valid —
//! malformed grid sizes, out-of-range exponents) and *guard* errors (a request
//! that is structurally fine but numerically unsafe on the given data —
//! aliasing, uncovered mass, insufficient octave coverage).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed grid specification (dimension, size, extent).
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Operands live on different grids or in different domains.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// A scalar or structural parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numerical-safety guard tripped (aliasing, uncovered mass,
    /// boundary leakage, insufficient coverage).
    #[error("guard violation: {0}")]
    Guard(String),

    /// The requested operation is not available for these inputs.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Root finding failed to bracket or converge.
    #[error("root finding failed: {0}")]
    RootFind(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that represent a tripped numerical-safety guard
    /// rather than a malformed request.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
