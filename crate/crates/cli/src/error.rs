use thiserror::Error;

/// Failures of the experiment runner, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver error: {0}")]
    Solver(#[from] hybridisc::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(hybridisc::Error::DegenerateSystem) => 3,
            CliError::Solver(hybridisc::Error::ConvergenceFailure { .. }) => 4,
            CliError::Io(_) | CliError::Solver(_) => 1,
        }
    }
}
