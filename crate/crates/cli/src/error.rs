use std::fmt;
use std::path::Path;

/// Everything a command can fail with, mapped onto the exit-code policy:
/// 2 for bad input or parameters, 1 for verification failures.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(levyd::Error),
    Io(String),
    Parse { path: String, line: usize, message: String },
    VerificationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn parse(path: &Path, line: usize, message: impl fmt::Display) -> Self {
        CliError::Parse { path: path.display().to_string(), line, message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed { .. } | CliError::Core(levyd::Error::Oracle(_)) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Parse { path, line, message } => write!(f, "{path}:{line}: {message}"),
            CliError::VerificationFailed { failed, total } => write!(f, "{failed} of {total} checks failed"),
        }
    }
}

impl From<levyd::Error> for CliError {
    fn from(e: levyd::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
