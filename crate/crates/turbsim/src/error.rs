use thiserror::Error;

#[derive(Debug, Error)]
pub enum TurbError {
    #[error("invalid Noll index {0} (must be >= 1)")]
    InvalidIndex(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("aperture contains no pupil samples")]
    ZeroAperture,

    #[error("image format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, TurbError>;
