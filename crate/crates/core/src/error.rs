use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("covariance of term {term} is singular")]
    SingularCovariance { term: usize },

    #[error(
        "pair sum gamma_{m} + conj(gamma_{n}) is numerically singular (condition {condition:.3e})"
    )]
    SingularPairSum { m: usize, n: usize, condition: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("imaginary residue {residual:.3e} exceeds hermiticity tolerance")]
    HermiticityViolation { residual: f64 },

    #[error("matrix is not positive definite")]
    NonPositiveDefinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation too tight: largest dropped weight is {ratio:.3e} of the largest kept")]
    TruncationTooTight { ratio: f64 },

    #[error("term count {terms} exceeds the configured cap {cap}")]
    TermCapExceeded { terms: usize, cap: usize },

    #[error("grid too coarse: step-halving changed {quantity} from {coarse:.6e} to {fine:.6e}")]
    GridTooCoarse {
        quantity: &'static str,
        coarse: f64,
        fine: f64,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularCovariance { .. }
                | Error::SingularPairSum { .. }
                | Error::GridTooCoarse { .. }
                | Error::NonPositiveDefinite
        )
    }
}
