use std::path::{Path, PathBuf};
use std::process::ExitCode;

use partial_theta::Error;
use thiserror::Error as ThisError;

pub const EXIT_IO: u8 = 1;
pub const EXIT_BAD_ARGS: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;
pub const EXIT_NO_CONVERGENCE: u8 = 4;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl From<std::io::Error> for CliError {
    fn from(source: std::io::Error) -> Self {
        CliError::Io {
            path: PathBuf::from("<buffer>"),
            source,
        }
    }
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Core(Error::NoConvergence(_) | Error::SingularDerivative(_)) => {
                EXIT_NO_CONVERGENCE
            }
            CliError::Core(Error::Structural(_)) => EXIT_MISMATCH,
            CliError::Core(_) | CliError::Usage(_) => EXIT_BAD_ARGS,
            CliError::Io { .. } | CliError::Json(_) | CliError::Csv(_) => EXIT_IO,
        };
        ExitCode::from(code)
    }
}
