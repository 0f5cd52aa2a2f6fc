use thiserror::Error;
use udw_core::harvest::HarvestError;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// The scenario is valid but the requested method cannot handle it.
    #[error("{0}")]
    Unsupported(HarvestError),
    /// Budget exhausted or regulator extrapolation unstable.
    #[error("{0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} acceptance criteria failed")]
    SelftestFailed(usize),
}

impl From<HarvestError> for CliError {
    fn from(e: HarvestError) -> Self {
        match e {
            HarvestError::UnsupportedScenario { .. }
            | HarvestError::CoincidentDetectors
            | HarvestError::InvalidArgument { .. } => CliError::Unsupported(e),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Unsupported(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::SelftestFailed(_) => 1,
        }
    }
}
