use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an argument outside the operation's domain.
    #[error("invalid input: {0}")]
    Input(String),

    /// Malformed edge-list text.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The graph does not satisfy an operation's structural precondition.
    #[error("graph error: {0}")]
    Graph(String),

    /// Surrogate fitting failed, typically a Gram matrix that stays
    /// non-positive-definite after the maximum jitter.
    #[error("GP fit failed: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("objective evaluation failed: {0}")]
    Objective(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Wraps the message of `self` with an outer context string.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("{ctx}: {m}")),
            Error::Objective(m) => Error::Objective(format!("{ctx}: {m}")),
            Error::Input(m) => Error::Input(format!("{ctx}: {m}")),
            Error::Graph(m) => Error::Graph(format!("{ctx}: {m}")),
            Error::Fit(m) => Error::Fit(format!("{ctx}: {m}")),
            other => Error::Config(format!("{ctx}: {other}")),
        }
    }
}
