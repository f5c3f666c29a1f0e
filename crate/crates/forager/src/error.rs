//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by distribution primitives, model construction, the
/// environment, and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A weight vector could not be turned into a probability distribution
    /// (empty, all-zero, or containing negative entries).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A numeric argument was outside its domain (non-finite logit,
    /// non-positive Dirichlet concentration, zero temperature, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two arrays that must agree in shape did not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An observation index fell outside its modality's outcome range.
    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    /// The environment was stepped or observed after the agent died.
    #[error("agent is dead")]
    DeadAgent,

    /// A scenario or model configuration failed validation.
    #[error("invalid config: {0}")]
    Config(String),

    /// File I/O failed; the path is kept for context.
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    /// JSON (de)serialization failed.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an I/O error with the path it concerns.
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
