use acm_core::Error;

/// Command failure with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The run finished but did not converge; outputs were written.
    #[error("evolution did not converge")]
    NotConverged,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    /// The solver failed after validation, e.g. the contour vanished.
    #[error("run failed: {0}")]
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NotConverged | CliError::Run(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => CliError::Io(e.to_string()),
            Error::ContourVanished | Error::OpenChain | Error::ContourRunaway(_) => {
                CliError::Run(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}
