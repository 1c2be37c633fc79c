use thiserror::Error;

/// Error type shared across the whole toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("layout error: {0}")]
    Layout(String),

    /// An operation's input contract was violated (non-Hermitian matrix where
    /// a Hermitian one is required, non-projector, non-observable, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("index out of range: {0}")]
    IndexRange(String),

    /// Conditioning on an outcome of (numerically) zero probability.
    #[error("undefined conditional: {0}")]
    UndefinedConditional(String),

    #[error("not canonicalizable: {0}")]
    NotCanonicalizable(String),

    /// A certification suite did not pass, so downstream extraction refuses
    /// to run.
    #[error("certification premise unmet: {0}")]
    PremiseUnmet(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
