use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet `{name}`: {reason}")]
    InvalidAlphabet { name: String, reason: String },

    #[error("invalid distribution {what}: {reason}")]
    InvalidDistribution { what: String, reason: String },

    #[error("axis mismatch: {0}")]
    AxisMismatch(String),

    #[error("unknown axis `{0}`")]
    UnknownAxis(String),

    #[error("table with {cells} cells exceeds the limit of {limit} cells")]
    TableTooLarge { cells: u128, limit: usize },

    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("{what} needs {needed} enumerations but the budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("no tuple can meet the distortion budget: minimum achievable distortion {min} > {delta} for {which}")]
    InfeasibleDistortion { which: String, min: f64, delta: f64 },

    #[error("infeasible tuple: {0}")]
    InfeasibleTuple(String),

    #[error("region is empty")]
    EmptyRegion,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dist(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidDistribution {
            what: what.into(),
            reason: reason.into(),
        }
    }
}
