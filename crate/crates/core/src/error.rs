use thiserror::Error;

/// Errors produced by the chart pipeline and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fit failure: {0}")]
    FitFailure(String),

    #[error("classification failure: {0}")]
    ClassificationFailure(String),

    #[error("extraction failure: {0}")]
    ExtractionFailure(String),

    #[error("degenerate bar: {0}")]
    DegenerateBar(String),

    #[error("pixel scale unavailable: {0}")]
    ScaleUnavailable(String),

    #[error("pixel scale inconsistent: {0}")]
    ScaleInconsistent(String),

    #[error("OCR engine unavailable: {0}")]
    EngineUnavailable(String),

    #[error("image decode error: {0}")]
    Decode(String),

    #[error("manifest lists no charts: {0}")]
    EmptyManifest(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
