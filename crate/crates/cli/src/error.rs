use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] prspace::Error),
}

impl CliError {
    /// Category printed on stderr for scripts to match on.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Read { .. } => "ReadError",
            CliError::Write { .. } => "WriteError",
            CliError::Usage(_) => "UsageError",
            CliError::Core(e) => e.category(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.category(), "message": self.to_string() }).to_string()
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
