use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrackError {
    #[error("video {video}: frame {frame} arrives after frame {last}")]
    StreamOrder { video: String, frame: u64, last: u64 },

    #[error("embedding dimension {found} does not match memory dimension {expected}")]
    Dimension { expected: usize, found: usize },

    #[error("detection in frame {frame} has no embedding")]
    MissingEmbedding { frame: u64 },

    #[error("invalid detection: {0}")]
    InvalidDetection(String),

    #[error("invalid tracker config: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TrackError>;
