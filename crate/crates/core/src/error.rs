use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation of `{field}` produced a non-finite value")]
    Evaluation { field: String },

    #[error("integration diverged; last finite state at t = {last_t}")]
    Divergence { last_t: f64 },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("accuracy: {0}")]
    Accuracy(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
