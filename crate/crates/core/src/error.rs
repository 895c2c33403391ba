use thiserror::Error;

/// Errors raised by state construction, the protocol engine, and the oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude must be positive and finite, got {0}")]
    InvalidAmplitude(f64),

    #[error("loss rate r^2 must lie in [0, 1), got {0}")]
    InvalidLoss(f64),

    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },

    #[error("invalid mode index {index} for a {modes}-mode state")]
    InvalidMode { index: usize, modes: usize },

    #[error("beam splitter needs two distinct modes, got {0} twice")]
    SameMode(usize),

    #[error("tolerance must be non-negative, got {0}")]
    NegativeTolerance(f64),

    #[error("window half-width must be non-negative, got {0}")]
    NegativeWindow(f64),

    #[error("target fidelity must lie in (0, 1), got {0}")]
    InvalidTarget(f64),

    #[error("node count must be odd and at least 3, got {0}")]
    InvalidNodeCount(usize),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("expected a single-mode state, got {0} modes")]
    NotSingleMode(usize),

    #[error("Fock cutoff {cutoff} too small: norm deficit {deficit:e} exceeds {limit:e}")]
    CutoffTooSmall { cutoff: usize, deficit: f64, limit: f64 },

    #[error("dyad count {count} exceeds the cap of {cap} at stage {stage}")]
    DyadExplosion { stage: usize, count: usize, cap: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(&'static str),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
