use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Both γ and Δ vanish: the levels cross and eigenvectors are undefined.
    #[error("degenerate bundle: gamma = delta = 0 at this point (levels cross)")]
    DegenerateBundle,

    #[error("lambda = {lambda} (with step {step}) leaves the model domain [{lo}, {hi}]")]
    DomainExceeded {
        lambda: f64,
        step: f64,
        lo: f64,
        hi: f64,
    },

    /// The measurement outcome is certain, so the Fisher information is not defined.
    #[error("deterministic outcome (q = {q}): Fisher information undefined")]
    DeterministicOutcome { q: f64 },

    #[error("derivative bundle has vanishing (d_gamma, d_delta)")]
    ZeroDerivative,

    #[error("zero-temperature QFI vanishes; first-order kappa expansion is ill-defined")]
    ZeroQfi,

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("non-identifiable: {0}")]
    NonIdentifiable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("model configuration: {0}")]
    Config(String),

    #[error("batch {index}: {source}")]
    Batch { index: usize, source: Box<Error> },
}
