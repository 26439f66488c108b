use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// Failures, grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, manifest or plan.
    Config(String),
    /// Unreadable, missing or inconsistent input data.
    Data(String),
    /// Valid input with nothing in it.
    NothingToDo(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::NothingToDo(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::NothingToDo(m) => write!(f, "nothing to do: {m}"),
        }
    }
}
