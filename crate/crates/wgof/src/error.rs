use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Core(#[from] wgof_core::Error),
    #[error("{spec}: {source}")]
    Statistic {
        spec: String,
        #[source]
        source: wgof_core::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse {what} {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
    #[error("{path}:{line}: {reason}")]
    Input { path: PathBuf, line: usize, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("critical value cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(wgof_core::Error::EmptySample) => "empty_sample",
            Error::Core(_) | Error::Statistic { .. } => "invalid_argument",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Input { .. } => "input",
            Error::Io { .. } => "io",
            Error::Csv(_) | Error::Json(_) => "format",
            Error::Cache { .. } => "cache",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
