use thiserror::Error;

/// Errors raised by the exclusion toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("invalid multiplier: {0}")]
    InvalidMultiplier(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("not a valid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("empty eigenvalue multiset")]
    EmptySpectrum,
}

pub type Result<T> = std::result::Result<T, Error>;
