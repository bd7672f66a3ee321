use thiserror::Error;
use zetaforms_core::criterion::CriterionError;
use zetaforms_core::linear_forms::LinearFormError;
use zetaforms_core::oscillation::OscillationError;
use zetaforms_core::zeta::ZetaError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("budget: {0}")]
    Budget(String),
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl From<ZetaError> for CliError {
    fn from(e: ZetaError) -> Self {
        match e {
            ZetaError::InvalidArgument { .. } => CliError::Usage(e.to_string()),
            ZetaError::BudgetUnreachable { .. } => CliError::Budget(e.to_string()),
            ZetaError::VerificationFailed { .. } | ZetaError::Missing(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<LinearFormError> for CliError {
    fn from(e: LinearFormError) -> Self {
        use LinearFormError::*;
        match e {
            InvalidIndex(_) => CliError::Usage(e.to_string()),
            BudgetExceeded { .. } | CutoffBudgetExceeded { .. } | InsufficientPrecision { .. } => {
                CliError::Budget(e.to_string())
            }
            Zeta(z) => z.into(),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<OscillationError> for CliError {
    fn from(e: OscillationError) -> Self {
        match e {
            OscillationError::Parse(_) | OscillationError::PrecisionTooLow { .. } | OscillationError::NoPairs => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<CriterionError> for CliError {
    fn from(e: CriterionError) -> Self {
        match e {
            CriterionError::Domain(m) => CliError::Domain(m),
            CriterionError::Oscillation(o) => o.into(),
        }
    }
}
