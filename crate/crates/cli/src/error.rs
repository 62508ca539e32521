use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] chiral_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn code(&self) -> &'static str {
        use chiral_core::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Scaling(_) => "SCALING_VIOLATION",
                E::Configuration(_) => "INVALID_CONFIGURATION",
                E::Parse(_) => "PARSE_ERROR",
                E::Optimization(_) => "OPTIMIZATION_FAILED",
                E::Dimension(_)
                | E::Domain(_)
                | E::Parameter(_)
                | E::GridMismatch
                | E::InvalidField(_)
                | E::Unsupported(_) => "INVALID_PARAMETER",
            },
            CliError::Config(_) => "INVALID_CONFIGURATION",
            CliError::Usage(_) => "USAGE_ERROR",
            CliError::Io { .. } => "IO_ERROR",
        }
    }

    /// 1 for runtime failures, 2 for rejected input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(chiral_core::Error::Optimization(_)) | CliError::Io { .. } => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "code": self.code(), "message": self.to_string() } }).to_string()
    }
}
