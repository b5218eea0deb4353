use thiserror::Error;

use crate::siegel::ReductionResult;

/// Errors raised by the numerical and combinatorial routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input rejected before any computation (non-finite entries, empty lists, out-of-range sizes).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter outside its admissible range, e.g. a tube parameter below √3/2.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `Cτ + D` is numerically singular.
    #[error("ill-conditioned action: |det(Cτ + D)| = {det_abs:e} is below {epsilon:e}")]
    Conditioning { det_abs: f64, epsilon: f64 },

    /// The reduction loop hit its iteration cap. The best iterate is kept.
    #[error("reduction did not converge within {} iterations", best.iterations)]
    NonConvergence { best: Box<ReductionResult> },

    /// The requested accuracy needs more work than the configured limits allow.
    #[error("resource limit: {0}")]
    Resource(String),

    /// An internal consistency check failed; this indicates an evaluation bug.
    #[error("inconsistent result: {0}")]
    Inconsistency(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Whether the failure is caused by the caller's input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::InvalidParameter(_) | Error::Unsupported(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
