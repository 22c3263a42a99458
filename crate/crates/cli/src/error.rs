use skyrelay_core::PlanError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad scenario file or flag value.
    #[error("schema error: {0}")]
    Schema(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numeric(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Infeasible { .. } | PlanError::SafeGuard(..) | PlanError::Structural(..) => {
                CliError::Infeasible(e.to_string())
            }
            PlanError::Divergent(..) | PlanError::Numeric(..) => CliError::Numeric(e.to_string()),
            PlanError::Domain(..) | PlanError::InvalidScenario(..) | PlanError::UnsupportedExponent(..) => {
                CliError::Schema(e.to_string())
            }
        }
    }
}
