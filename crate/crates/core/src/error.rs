use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    ParameterDomain(String),

    #[error("unsupported operation: {0}")]
    UnsupportedOperation(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("value outside the distribution support: {0}")]
    OutOfSupport(String),

    #[error("degenerate arm: both arm standard deviations are zero")]
    DegenerateArm,

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("quadrature did not converge on [{lower}, {upper}] (error estimate {error:e})")]
    Convergence { lower: f64, upper: f64, error: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate evidence: every model has zero marginal likelihood")]
    DegenerateEvidence,

    #[error("empty training set: {0}")]
    EmptyTraining(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("too many failed comparisons: {failed} of {total}")]
    TooManyFailures { failed: usize, total: usize },
}

impl Error {
    /// True for errors caused by malformed or invalid user input, as opposed
    /// to numerical failures during computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ParameterDomain(_)
                | Error::OutOfSupport(_)
                | Error::DegenerateArm
                | Error::Invalid(_)
                | Error::Parse { .. }
                | Error::InsufficientData(_)
                | Error::InvalidEnsemble(_)
                | Error::UnsupportedOperation(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
