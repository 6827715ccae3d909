use thiserror::Error;

/// Error type shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A value violated a type invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// Bad or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),

    /// The analytic outage is undefined because the SINR denominator has no
    /// random mass (no interferers and no absorption noise).
    #[error("degenerate case: {0}")]
    Degenerate(String),

    /// The optimization problem has no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
