use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Io(_) => ExitCode::from(1),
            CliError::NonConvergence(_) => ExitCode::from(2),
            CliError::Invariant(_) => ExitCode::from(3),
        }
    }
}

impl From<steklov_core::Error> for CliError {
    fn from(e: steklov_core::Error) -> Self {
        match e {
            steklov_core::Error::NonConvergence(m) => CliError::NonConvergence(m),
            steklov_core::Error::Io(e) => CliError::Io(e),
            other => CliError::Config(other.to_string()),
        }
    }
}
