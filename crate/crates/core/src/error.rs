use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Inputs are individually valid but cannot be combined.
    #[error("usage error: {0}")]
    Usage(String),

    /// A configuration or file failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot allocate {reps} replications for n = {n}")]
    Resource { n: u64, reps: usize },

    #[error("{reps} replications are too few for a statistical estimate (need at least {min})")]
    InsufficientReps { reps: usize, min: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {detail}")]
    Parse { what: String, detail: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
