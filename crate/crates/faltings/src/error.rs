//! Error taxonomy shared by every module, with stable process exit codes.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain (Im τ ≤ 0, X ≤ 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Singular curve: 4A³ + 27B² = 0 (the cusp locus).
    #[error("singular curve: {0}")]
    Singular(String),

    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iteration failed to converge, or exact arithmetic overflowed.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Two independent computations of the same quantity disagree.
    #[error("integrity failure: {0}")]
    Integrity(String),
}

impl Error {
    /// Process exit code for the CLI: 2 usage/contract, 3 numeric, 4 integrity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Singular(_) | Error::Contract(_) => 2,
            Error::Numeric(_) => 3,
            Error::Integrity(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
