use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration model failed to produce a simple graph after {attempts} attempts (n={n}, r={r})")]
    PairingExhausted { n: usize, r: usize, attempts: usize },

    #[error(
        "general-position placement failed after {attempts} attempts: particle {particle} \
         kept landing within distance {min_distance} of particle {conflict}"
    )]
    PlacementExhausted {
        attempts: usize,
        particle: usize,
        conflict: usize,
        min_distance: usize,
    },

    #[error("eigenvalue iteration did not converge in {iterations} steps (last estimate {estimate}, residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        estimate: f64,
        residual: f64,
    },

    #[error("edge ({0}, {1}) has no weight")]
    UnresolvedEdge(usize, usize),

    #[error("not enough samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("malformed graph file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
