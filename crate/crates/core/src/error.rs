use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent p = {0} outside [1, 2]")]
    InvalidExponent(f64),

    #[error("{what}: argument {value} outside the admissible domain")]
    Domain { what: &'static str, value: f64 },

    #[error("{what}: non-finite value at x = {at}")]
    NonFinite { what: &'static str, at: f64 },

    #[error("quadrature budget of {max_panels} panels exhausted (partial value {partial}, error estimate {err_estimate})")]
    BudgetExceeded {
        partial: f64,
        err_estimate: f64,
        max_panels: usize,
    },

    #[error("integrand non-finite at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("{failed} of {total} samples failed")]
    TooManyFailures { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
