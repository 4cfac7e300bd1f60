use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("term ratios never settled below the certificate bound within {scanned} terms")]
    NoDecay { scanned: usize },

    #[error("{what}: bracket did not reach the requested tolerance within {terms} terms")]
    ToleranceUnreachable { what: &'static str, terms: usize },

    #[error("minimality scan for level {level} exceeded the budget of {budget} candidates")]
    ScanBudgetExceeded { level: u64, budget: u64 },

    #[error("index {index} is outside the range the numerics can represent")]
    IndexOutOfRange { index: String },

    #[error("probe needs series indices up to {needed}, beyond the evaluation cap {cap}")]
    InfeasibleLevel { needed: String, cap: u64 },

    #[error("length mismatch: {weights} weights for {parts} parts")]
    LengthMismatch { weights: usize, parts: usize },

    #[error("exponent p = {0} is not allowed here (need p >= 2)")]
    InvalidP(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LengthMismatch { .. } | Error::InvalidP(_) | Error::InvalidArgument(_) => 2,
            _ => 3,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NoDecay { .. } => "NoDecay",
            Error::ToleranceUnreachable { .. } => "ToleranceUnreachable",
            Error::ScanBudgetExceeded { .. } => "ScanBudgetExceeded",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::InfeasibleLevel { .. } => "InfeasibleLevel",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidP(_) => "InvalidP",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}
