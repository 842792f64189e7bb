use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid operator order: {0}")]
    InvalidOrder(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular polynomial fit: design rank {rank} < {needed} monomials")]
    SingularFit { rank: usize, needed: usize },
    #[error("polynomial fit residual {residual:e} exceeds tolerance {tol:e}")]
    FitResidual { residual: f64, tol: f64 },
    #[error("tail not certifiable: {0}")]
    TailNotCertifiable(String),
    #[error("quadrature budget exhausted: error estimate {err:e} above target {target:e}")]
    BudgetExhausted { err: f64, target: f64 },
    #[error("finite-difference step {h:e} too small for the requested tolerance")]
    StepUnderflow { h: f64 },
    #[error("point outside domain: {0}")]
    OutsideDomain(String),
    #[error("coincident points")]
    CoincidentPoints,
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    #[error("moment of order {order} equals {value:e}, expected 0 within {tol:e}")]
    MomentCheck { order: usize, value: f64, tol: f64 },
    #[error("sampling window too narrow: ratio {ratio} below {min_ratio}")]
    WindowTooNarrow { ratio: f64, min_ratio: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures that signal the result could not be certified
    /// (as opposed to malformed input).
    pub fn is_certification_failure(&self) -> bool {
        matches!(
            self,
            Error::TailNotCertifiable(_)
                | Error::BudgetExhausted { .. }
                | Error::MomentCheck { .. }
                | Error::NotIntegrable(_)
                | Error::FitResidual { .. }
                | Error::StepUnderflow { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
