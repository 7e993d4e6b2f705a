use thiserror::Error;

/// Failures of a command, split by who has to act on them.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input, arguments or configuration. Exit code 1.
    #[error("{0}")]
    User(String),
    /// Anything else, such as a failed write. Exit code 2.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<censored_mdpd::Error> for CliError {
    fn from(e: censored_mdpd::Error) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
