use std::io;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, ZestError>;

#[derive(Debug, Error)]
pub enum ZestError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("codec {0} is not supported for this operation")]
    UnsupportedCodec(String),

    #[error("dictionary training failed: {0}")]
    TrainingFailed(String),

    #[error("class {0:?} has no usable (non-empty after preparation) examples")]
    EmptyClass(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("label sets do not match: {0}")]
    LabelMismatch(String),

    #[error("model format error: {0}")]
    Format(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}
