use std::path::PathBuf;

use qda_core::Error as CoreError;

/// Failures while reading an input file.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("expected header `node_id,ux,uy,uz`, found `{found}`")]
    Header { found: String },
    #[error("line {line}: non-finite displacement component")]
    NonFinite { line: u64 },
    #[error("line {line}: duplicate node id {node_id}")]
    Duplicate { line: u64, node_id: u64 },
    #[error(transparent)]
    Field(#[from] CoreError),
    #[error("invalid report: {0}")]
    Report(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Top-level command failure, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Numeric(#[from] CoreError),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) | AppError::Io { .. } => 1,
            AppError::Parse { .. } => 2,
            AppError::Numeric(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, source: ParseError) -> Self {
        match source {
            ParseError::Io(e) => AppError::io(path, e),
            source => AppError::Parse {
                path: path.into(),
                source,
            },
        }
    }
}
