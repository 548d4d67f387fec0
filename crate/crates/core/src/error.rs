use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("data format error at row {row}: {message}")]
    DataFormat { row: usize, message: String },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The circuit moved (almost) all amplitude off the requested context.
    #[error("degenerate prediction for context {context}: context-preservation score {preservation:.3e}")]
    DegeneratePrediction { context: String, preservation: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DataFormat { .. } | Error::DegenerateData(_) | Error::Io { .. } => 2,
            Error::InvalidArgument(_) | Error::Config(_) | Error::Json(_) => 3,
            Error::Resource(_) => 4,
            Error::DegeneratePrediction { .. } => 5,
        }
    }
}
