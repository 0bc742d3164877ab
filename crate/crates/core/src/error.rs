//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched lengths or shapes between related inputs.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// NaN or infinite value where a finite number is required.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// Input is structurally valid but statistically degenerate
    /// (constant column, zero-variance target, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Fold partitioning cannot be carried out as requested.
    #[error("partition error: {0}")]
    Partition(String),

    /// Model selection produced (or was given) an unusable pool.
    #[error("selection error: {0}")]
    Selection(String),

    /// A linear system has no unique solution.
    #[error("singular system: {0}")]
    Singular(String),

    /// A base predictor failed; identifies the model and fold.
    #[error("predictor '{model}' failed on fold {fold}: {source}")]
    Predictor {
        model: String,
        fold: usize,
        #[source]
        source: Box<Error>,
    },

    /// Invalid configuration value.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &str) -> Error {
        match self {
            Error::Dimension(m) => Error::Dimension(format!("[{stage}] {m}")),
            Error::NonFinite(m) => Error::NonFinite(format!("[{stage}] {m}")),
            Error::Degenerate(m) => Error::Degenerate(format!("[{stage}] {m}")),
            Error::Partition(m) => Error::Partition(format!("[{stage}] {m}")),
            Error::Selection(m) => Error::Selection(format!("[{stage}] {m}")),
            Error::Singular(m) => Error::Singular(format!("[{stage}] {m}")),
            Error::Config(m) => Error::Config(format!("[{stage}] {m}")),
            e @ Error::Predictor { .. } => e,
        }
    }
}
