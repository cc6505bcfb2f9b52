use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),
    #[error("unknown preset `{name}`; available: {}", .available.join(", "))]
    UnknownPreset { name: String, available: Vec<&'static str> },
    #[error("numerical integrity failure: {0}")]
    Integrity(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Core(entfreeze::Error),
    #[error("{0}")]
    Artifact(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }

    /// Process exit status: 2 for rejected input, 3 for integrity aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::UnknownPreset { .. } => 2,
            Self::Integrity(_) | Self::Core(entfreeze::Error::NumericalIntegrity(_)) => 3,
            Self::Core(entfreeze::Error::InvalidSpec(_) | entfreeze::Error::Parameter(_)) => 2,
            _ => 1,
        }
    }
}

impl From<entfreeze::Error> for CliError {
    fn from(e: entfreeze::Error) -> Self {
        match e {
            entfreeze::Error::NumericalIntegrity(m) => Self::Integrity(m),
            other => Self::Core(other),
        }
    }
}
