use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("terminal input: {0}")]
    Terminal(String),

    #[error("orbit terminated before depth {requested} (reached {reached})")]
    DepthExceeded { requested: usize, reached: usize },

    #[error("exponent nu must be positive, got {0}")]
    InvalidNu(f64),

    #[error("orbit terminated before any term of the series")]
    RationalTermination,

    #[error("expansion does not match the allowed convergent patterns: {0}")]
    AlignmentViolation(String),

    #[error("integral diverges on the requested domain: {0}")]
    DivergentIntegral(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("sampling gave up after {0} rejected draws")]
    SamplingExhausted(usize),

    #[error("fixture error: {0}")]
    Fixture(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
