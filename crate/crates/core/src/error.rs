use thiserror::Error;

use crate::solver::SolveDiagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Parameters fall outside the hypotheses of the requested estimate.
    #[error("outside proven regime: {0}")]
    Regime(String),

    /// The degenerate limit where an exponent formula has a vanishing denominator.
    #[error("critical case: {0}")]
    Critical(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("newton iteration did not converge at n = {level}: {reason}")]
    NonConvergence {
        level: u64,
        reason: String,
        diagnostics: Box<SolveDiagnostics>,
    },

    #[error("singular jacobian (zero pivot at row {row})")]
    SingularJacobian { row: usize },

    #[error("continuation diverged: truncated-energy differences non-decreasing up to n = {level}")]
    Divergence {
        level: u64,
        diagnostics: Box<SolveDiagnostics>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Diagnostics carried by solver failures, if any.
    pub fn diagnostics(&self) -> Option<&SolveDiagnostics> {
        match self {
            Error::NonConvergence { diagnostics, .. } | Error::Divergence { diagnostics, .. } => {
                Some(diagnostics)
            }
            _ => None,
        }
    }
}
