use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("markov triple entries must be positive, got ({0}, {1}, {2})")]
    NonPositive(String, String, String),

    #[error("({0}, {1}, {2}) is not a solution of x² + y² + z² = 3xyz")]
    NotMarkov(String, String, String),

    #[error("triple {0} is singular and has no tree children")]
    SingularTriple(String),

    #[error("invalid slope [{0}:{1}]: {2}")]
    InvalidSlope(String, String, &'static str),

    #[error("invalid holonomy pair: {0}")]
    InvalidHolonomy(&'static str),

    #[error("precision mismatch: {0} digits vs {1} digits")]
    PrecisionMismatch(u32, u32),

    #[error("precision must be at least {min} digits, got {got}")]
    PrecisionTooLow { got: u32, min: u32 },

    #[error("markov number must be positive")]
    ZeroMarkov,

    #[error(
        "insufficient precision at n = {n}: remainder is below the rounding budget at {digits} digits; \
         re-run with at least {suggested} digits"
    )]
    InsufficientPrecision { n: u64, digits: u32, suggested: u32 },

    #[error("markov stream ended after {0} distinct values")]
    StreamExhausted(u64),

    #[error("checkpoint version {found} is not supported (expected {expected})")]
    CheckpointVersion { found: u16, expected: u16 },

    #[error("corrupted checkpoint: {0}")]
    CheckpointCorrupt(&'static str),

    #[error("invalid number literal {0:?}")]
    Parse(String),
}
