use std::path::PathBuf;

use fractal_fourier_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 argument, 3 resource, 4 degenerate data, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(e) => match e {
                CoreError::Range { .. } | CoreError::Resource { .. } => 3,
                CoreError::Degenerate(_) | CoreError::Numeric(_) => 4,
                CoreError::Argument(_)
                | CoreError::Resolution(_)
                | CoreError::Contract(_)
                | CoreError::NotAvailable(_) => 2,
            },
            Self::Argument(_) => 2,
            Self::Io { .. } | Self::Csv { .. } => 5,
        }
    }
}
