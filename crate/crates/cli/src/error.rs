use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] orbitframe::Error),

    /// A computed check failed; the report has already been written.
    #[error("domain failure [{invariant}]: {detail}")]
    Failed { invariant: &'static str, detail: String },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_domain_failure() => 1,
            CliError::Failed { .. } => 1,
            _ => 2,
        }
    }

    /// Line printed on stderr; domain failures lead with the invariant name.
    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) if e.is_domain_failure() => {
                format!("domain failure [{}]: {e}", e.invariant_name())
            }
            other => other.to_string(),
        }
    }
}
