use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("invalid target rate {0}; must lie in (0, 1)")]
    InvalidTarget(f64),

    #[error(transparent)]
    Core(#[from] lrid_core::CoreError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EvalError>;
