use fourmode_core::analysis::AnalysisError;
use thiserror::Error;

/// Failure of a CLI run, mapped onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Statistics(String),
    #[error("{0}")]
    Fit(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    /// 2 config, 3 statistics, 4 fit, 5 I/O, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Statistics(_) => 3,
            CliError::Fit(_) => 4,
            CliError::Io(_) => 5,
            CliError::Other(_) => 1,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::InsufficientStatistics(_) | AnalysisError::BootstrapUndefined { .. } => {
                CliError::Statistics(e.to_string())
            }
            AnalysisError::FitFailed { .. } => CliError::Fit(e.to_string()),
            AnalysisError::TooFewResamples(_) => CliError::Config(e.to_string()),
            AnalysisError::InvalidInput(_) => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
