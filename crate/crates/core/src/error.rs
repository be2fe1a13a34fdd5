use std::io;

use thiserror::Error;

/// Errors raised by the exploration engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("activation center undefined for a pattern without activity")]
    UndefinedCenter,

    #[error("history is empty")]
    EmptyHistory,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("training diverged: {0}")]
    NonFiniteLoss(String),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("image export failed: {0}")]
    Image(#[from] image::ImageError),
}

impl Error {
    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
