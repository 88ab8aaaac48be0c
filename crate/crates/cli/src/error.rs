use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, selectors or config values; exit status 2.
    #[error("{0}")]
    Usage(String),
    /// A computation or I/O step failed; exit status 1.
    #[error("{0}")]
    Run(String),
}

impl CliError {
    pub fn run(e: impl std::fmt::Display) -> Self {
        CliError::Run(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}
