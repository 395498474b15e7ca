use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e}, tolerance {tolerance:e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("singular transformation")]
    Singular,

    #[error("degenerate composition: g has a multiple root near {root}")]
    DegenerateComposition { root: f64 },

    #[error("degenerate spectrum: gap {gap:e} below threshold")]
    DegenerateSpectrum { gap: f64 },

    #[error("repulsion boundary: coincident eigenvalues")]
    RepulsionBoundary,

    #[error("simplex violation: eigenvalues sum to {sum}")]
    SimplexViolation { sum: f64 },

    #[error("rejection starved: acceptance rate {rate:e}")]
    RejectionStarved { rate: f64 },

    #[error("pole of the gamma function at {0}")]
    GammaPole(f64),

    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
