use plasticwalk::WalkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration value is out of range or inconsistent.
    #[error("config error in '{field}': {message}")]
    Config { field: String, message: String },

    /// The config document does not parse.
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] WalkError),

    /// The run completed but some of its checks failed.
    #[error("{} check(s) failed: {}", .0.len(), .0.join("; "))]
    Checks(Vec<String>),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// 0 success, 1 runtime or numerical failure, 2 configuration error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Parse(_) => 2,
            CliError::Io(_) | CliError::Numerical(_) | CliError::Checks(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
