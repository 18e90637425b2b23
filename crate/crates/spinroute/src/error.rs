use std::path::PathBuf;

use spinroute_core::error::{ArchError, CodeError, CompileError, EmitError, MetricsError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Arch(#[from] ArchError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status: 2 when the instance has no schedule, 3 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Compile(CompileError::Code(
                CodeError::LayoutOutOfBounds { .. } | CodeError::LayoutTooSmall { .. },
            )) => 2,
            Error::Compile(CompileError::Code(_) | CompileError::Arch(_)) => 3,
            Error::Compile(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
