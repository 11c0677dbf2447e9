use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported space kind `{0}` for this operation")]
    UnsupportedKind(String),

    #[error("metric axiom violated: {0}")]
    MetricViolation(String),

    #[error("{what}: needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("injectivity violated: {0}")]
    Injectivity(String),

    #[error("delta {delta} is not below the injectivity radius {epsilon} for word radius {radius}")]
    DeltaAboveThreshold {
        delta: f64,
        epsilon: f64,
        radius: usize,
    },

    #[error("metric is not translation invariant: {0}")]
    NotInvariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("assertion `{invariant}` failed: {witness}")]
    Assertion { invariant: String, witness: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
