use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {0} is a pole")]
    PoleArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("reduction did not terminate within {0} steps")]
    ReductionFailure(usize),

    #[error("tolerance not met for {what}: error estimate {estimate:e} exceeds {requested:e}")]
    ToleranceNotMet {
        what: String,
        estimate: f64,
        requested: f64,
    },

    #[error("degenerate fit: {0}")]
    FitDegenerate(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("series does not converge: {0}")]
    Convergence(String),

    #[error("non-finite sample: {0}")]
    NonFiniteSample(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures caused by an exhausted iteration or subdivision budget.
    pub fn is_budget_exhausted(&self) -> bool {
        matches!(
            self,
            Error::ToleranceNotMet { .. } | Error::ReductionFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
