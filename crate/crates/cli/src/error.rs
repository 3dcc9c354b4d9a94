use thiserror::Error;

/// Failures surfaced by the command line, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed scenario file or flag value (exit code 2).
    #[error("input error: {0}")]
    Input(String),
    /// Failure while computing or writing results (exit code 3).
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<phykey::Error> for CliError {
    fn from(e: phykey::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Maps a core error raised while validating user input to exit code 2.
pub fn input(e: phykey::Error) -> CliError {
    CliError::Input(e.to_string())
}
