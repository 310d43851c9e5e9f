use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, configuration or input data (exit 2).
    #[error("{0}")]
    Input(String),

    /// Failure while running a valid request (exit 1).
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn classify(is_io: bool, msg: String) -> CliError {
    if is_io {
        CliError::Runtime(msg)
    } else {
        CliError::Input(msg)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<lrid_core::CoreError> for CliError {
    fn from(e: lrid_core::CoreError) -> Self {
        classify(matches!(e, lrid_core::CoreError::Io(_)), e.to_string())
    }
}

impl From<lrid_eval::EvalError> for CliError {
    fn from(e: lrid_eval::EvalError) -> Self {
        use lrid_eval::EvalError as E;
        let io = matches!(e, E::Io(_) | E::Core(lrid_core::CoreError::Io(_)));
        classify(io, e.to_string())
    }
}

impl From<lrid_fusion::FusionError> for CliError {
    fn from(e: lrid_fusion::FusionError) -> Self {
        use lrid_fusion::FusionError as E;
        let io = matches!(e, E::Io(_) | E::Core(lrid_core::CoreError::Io(_)));
        classify(io, e.to_string())
    }
}

impl From<lrid_track::TrackError> for CliError {
    fn from(e: lrid_track::TrackError) -> Self {
        classify(matches!(e, lrid_track::TrackError::Io(_)), e.to_string())
    }
}

impl From<lrid_turbsim::TurbError> for CliError {
    fn from(e: lrid_turbsim::TurbError) -> Self {
        classify(matches!(e, lrid_turbsim::TurbError::Io(_)), e.to_string())
    }
}

impl From<lrid_losses::LossError> for CliError {
    fn from(e: lrid_losses::LossError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        classify(e.is_io(), e.to_string())
    }
}
