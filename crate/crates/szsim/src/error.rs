use std::path::PathBuf;

use szegedy::WalkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("{}: {message}", path.display())]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("numerical invariant violated: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// Process exit code: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Validation(_) | SimError::Input { .. } => 2,
            SimError::Walk(WalkError::UnnormalizedState { .. }) => 3,
            SimError::Walk(_) => 2,
            SimError::Numerical(_) => 3,
            SimError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
