use thiserror::Error;

/// Errors raised by parameter validation, the special functions, and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical quantity that must be strictly positive (and finite) was not.
    #[error("invalid parameter `{field}`: expected a finite value > 0, got {value}")]
    NonPositive { field: &'static str, value: f64 },

    /// A value fell outside its admissible interval.
    #[error("parameter `{field}` = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        field: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A function argument outside the function's domain.
    #[error("{function}: argument {value} is outside the domain")]
    Domain { function: &'static str, value: f64 },

    /// Least-squares slope fit could not be formed.
    #[error("diversity fit failed: {0}")]
    Fit(String),

    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
