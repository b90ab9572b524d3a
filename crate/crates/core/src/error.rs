use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("pulse coefficients violate endpoint constraints (odd residual {odd:e}, even residual {even:e})")]
    InvalidCoefficients { odd: f64, even: f64 },

    #[error("integrator failed at t = {time:e} s: {reason}")]
    Integrator { time: f64, reason: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("index {index} out of range for front of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
