use thiserror::Error;

use crate::network::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid network: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidNetwork(Vec<Violation>),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("weight w[{neuron},{analog}] is zero, the ratio is undefined")]
    UndefinedRatio { neuron: usize, analog: usize },

    #[error("horizon {have} too small, need at least {need}")]
    Horizon { have: usize, need: usize },

    #[error("timing error: {0}")]
    Timing(String),

    #[error("delta violation on word {word:?}: no query within {delta} steps after t={since}")]
    DeltaViolation { word: String, delta: usize, since: usize },

    #[error("resource budget exceeded: {0}")]
    Budget(String),
}
