use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}:{line}: {msg}")]
    Config { path: PathBuf, line: usize, msg: String },

    #[error(transparent)]
    Model(#[from] gtasep::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),

    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 0 success, 1 validation failure, 2 usage error, 3 resource error.
    pub fn exit_code(&self) -> u8 {
        use gtasep::Error as E;
        match self {
            Self::Validation(_) => 1,
            Self::Usage(_) | Self::Config { .. } => 2,
            Self::Model(e) => match e {
                E::Resource(_) | E::IterationLimit(_) => 3,
                E::InvalidParameter(_)
                | E::Domain(_)
                | E::OutOfRadius(_)
                | E::SingularParameter(_)
                | E::DegenerateConfiguration(_) => 2,
                E::DegenerateSeries(_) | E::CrossCheck(_) => 1,
            },
            Self::Io { .. } | Self::Csv(_) | Self::Json(_) => 3,
        }
    }
}
