use std::process::ExitCode;

/// Failure classes with their process exit codes: configuration problems
/// exit 2, numeric or contract violations exit 3, design-search failures
/// exit 4.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("optimization failed: {0}")]
    Optimization(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Numeric(_) => ExitCode::from(3),
            CliError::Optimization(_) => ExitCode::from(4),
        }
    }
}

impl From<harper_core::Error> for CliError {
    fn from(e: harper_core::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o failure: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
