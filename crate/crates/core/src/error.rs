use thiserror::Error;

use crate::Modality;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("cannot normalize: {0}")]
    Normalization(String),

    #[error("aggregation over an empty template list")]
    EmptyAggregation,

    #[error("aggregation mixes subjects or modalities: {0}")]
    MixedAggregation(String),

    #[error("quality {0} outside [0, 1]")]
    InvalidQuality(f64),

    #[error("no {0} vector present")]
    MissingModality(Modality),

    #[error("format error: {0}")]
    Format(String),

    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CoreError>;
