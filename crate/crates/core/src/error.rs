use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed MDP: {0}")]
    MalformedMdp(String),

    #[error("stochastic dominance is defined for two-state MDPs, got {0} states")]
    NotBinaryStateSpace(usize),

    #[error("competitive ratio undefined: optimal value {0} is not positive")]
    NonPositiveOptimum(f64),

    #[error("threshold schedule covers {got} stages, horizon needs {need}")]
    ScheduleLength { got: usize, need: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("corrupt run file {path}: {reason}")]
    CorruptRun { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
