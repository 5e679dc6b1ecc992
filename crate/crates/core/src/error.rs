use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("simulation produced a non-finite state at step {step}")]
    NonFiniteState { step: usize },

    /// The candidate bandwidth set is empty because its lower threshold is at least 1.
    #[error(
        "empty bandwidth grid: threshold {threshold:.6} >= 1 at T = {horizon}; increase the observation horizon"
    )]
    EmptyGrid { threshold: f64, horizon: f64 },

    #[error("config error at `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    /// Short stable tag used in machine-readable CLI errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Numeric(_) => "numeric",
            Error::NonFiniteState { .. } => "simulation",
            Error::EmptyGrid { .. } => "empty_grid",
            Error::Config { .. } => "config",
            Error::DegenerateData(_) => "degenerate_data",
            Error::Io(_) => "io",
        }
    }
}
