use std::fmt;

/// Top-level CLI failure, carrying the process exit code:
/// 2 for configuration errors, 3 for data errors, 4 for pipeline stage
/// failures.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Stage { stage: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Stage { .. } => 4,
        }
    }

    pub fn stage(stage: &'static str, err: impl fmt::Display) -> CliError {
        CliError::Stage {
            stage,
            message: err.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Stage { stage, message } => write!(f, "stage '{stage}' failed: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;
