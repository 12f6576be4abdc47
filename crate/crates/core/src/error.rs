//! Error type shared across the library.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid nodes: {0}")]
    InvalidNodes(String),

    #[error(
        "Gram matrix is ill-conditioned (condition {cond:.3e} exceeds {limit:.1e}); \
         retry with a regularization mu > 0"
    )]
    IllConditioned { cond: f64, limit: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(
        "perturbation precondition violated at indices {indices:?}: \
         max |v_j - e_j| = {max_norm:.6} exceeds d = {d:.6}"
    )]
    PerturbationExceeded {
        indices: Vec<usize>,
        max_norm: f64,
        d: f64,
    },

    #[error("requested subspace is empty: (1 - alpha^2 d^2) n = {value:.4} <= 1")]
    SubspaceTooSmall { value: f64 },

    #[error("degenerate subspace: basis is numerically rank-deficient")]
    DegenerateSubspace,

    #[error(
        "quadrature too coarse: trace {trace:.6} deviates from {expected:.6} by more than 5%; \
         suggested node count: {suggested}"
    )]
    ResolutionTooCoarse {
        trace: f64,
        expected: f64,
        suggested: usize,
    },

    #[error("hypothesis not witnessed: d_hat = {d_hat:.6} is not below 1")]
    HypothesisNotWitnessed { d_hat: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid_parameter(name: &'static str, reason: String) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
