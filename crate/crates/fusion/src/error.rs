use thiserror::Error;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("cannot normalize {modality}: {reason}")]
    Normalization { modality: String, reason: String },

    #[error("gallery row {row} has no present modality")]
    MissingScore { row: usize },

    #[error("ranking targets are constant; nothing to rank")]
    RankingDegenerate,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid hyperparameter: {0}")]
    Hyperparameter(String),

    #[error("no mated probe in the training set")]
    NoMatedProbe,

    #[error("labels: {0}")]
    Labels(String),

    #[error(transparent)]
    Core(#[from] lrid_core::CoreError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FusionError>;
