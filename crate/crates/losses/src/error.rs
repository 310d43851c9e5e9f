use thiserror::Error;

#[derive(Debug, Error)]
pub enum LossError {
    #[error("threshold set is empty: no non-mated scores available")]
    EmptyThresholdSet,

    #[error("no mated probes in the batch")]
    EmptyMatedSet,

    #[error("invalid batch partition: {0}")]
    Partition(String),

    #[error("invalid hyperparameter: {0}")]
    Hyperparameter(String),

    #[error("range class violation: {0}")]
    RangeClassViolation(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("feature map has zero total activation")]
    DegenerateActivation,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Core(#[from] lrid_core::CoreError),
}

pub type Result<T> = std::result::Result<T, LossError>;
