use std::path::PathBuf;

use quasifit_core::Error as CoreError;

/// Errors surfaced by the command-line tool, each with a stable exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed CSV, empty input or a dimension mismatch. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// The search stopped at its node limit. The incumbent has been written.
    /// Exit code 3.
    #[error("node limit of {nodes} reached with optimality gap {gap:e}")]
    NodeLimit { nodes: usize, gap: f64 },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(CoreError),
    #[error("{0}")]
    Other(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Core(e) if is_input_error(e) => 2,
            Self::NodeLimit { .. } => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

fn is_input_error(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::DimensionMismatch { .. } | CoreError::EmptyData | CoreError::InvalidData(_)
    )
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        Self::Core(e)
    }
}
