use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(clap::Error),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] qfest::Error),
}

impl CliError {
    /// 2 for bad input, 3 for failed computations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Input(_) | CliError::Core(qfest::Error::InvalidArgument(_)) => 2,
            CliError::Core(_) => 3,
        }
    }
}
