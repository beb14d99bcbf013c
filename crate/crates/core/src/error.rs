use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field mean {mean:e} exceeds tolerance {tol:e}")]
    NonzeroMean { mean: f64, tol: f64 },

    #[error("argument {value} lies outside the singular domain {domain}")]
    SingularDomain { value: f64, domain: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("density left the admissible band ({lo}, {hi}): min {min}, max {max}")]
    Confinement { lo: f64, hi: f64, min: f64, max: f64 },

    #[error("non-finite value detected at step {step}")]
    Divergence { step: u64 },

    #[error("initial phase field reaches {max_abs}, above the margin limit {limit}")]
    Margin { max_abs: f64, limit: f64 },

    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    #[error("insufficient history: need {need} records, have {have}")]
    InsufficientHistory { need: usize, have: usize },

    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Confinement { .. } => 2,
            Error::Divergence { .. } => 3,
            Error::Checkpoint(_) => 4,
            _ => 1,
        }
    }
}
