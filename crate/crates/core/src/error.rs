use thiserror::Error;

/// Errors raised by the numerical kernel, the closed forms and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series did not converge within {terms} terms ({what})")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("second parameter c = {c} is at (or within the guard of) a non-positive integer")]
    PoleAtC { c: f64 },

    #[error("U(a, c; 0) is infinite for a = {a}, c = {c}")]
    DivergentAtZero { a: f64, c: f64 },

    #[error("second parameter c = {c} is within the guard of an integer; perturb c")]
    IntegerC { c: f64 },

    #[error("incomplete gamma integral diverges for a = {a} at z = 0")]
    DivergentIntegral { a: f64 },

    #[error("digamma has a pole at z = {z}")]
    PoleAtNonPositiveInteger { z: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("initial capital {x0} is below the critical capital {critical}")]
    InvalidInitialCapital { x0: f64, critical: f64 },

    #[error("matching system at the barrier is singular (|K| = {k:e})")]
    SingularMatching { k: f64 },

    #[error("root bracket could not be evaluated: {0}")]
    BracketFailure(String),

    #[error("objective is not monotone on the bracket: F(lo) = {lo}, F(hi) = {hi}")]
    MonotonicityViolation { lo: f64, hi: f64 },

    #[error("scheme does not support this quantity: {0}")]
    Unsupported(String),
}

impl Error {
    /// Short machine-readable tag, used in `errors.log` and over the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::PoleAtC { .. } => "PoleAtC",
            Error::DivergentAtZero { .. } => "DivergentAtZero",
            Error::IntegerC { .. } => "IntegerC",
            Error::DivergentIntegral { .. } => "DivergentIntegral",
            Error::PoleAtNonPositiveInteger { .. } => "PoleAtNonPositiveInteger",
            Error::Domain(_) => "Domain",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidInitialCapital { .. } => "InvalidInitialCapital",
            Error::SingularMatching { .. } => "SingularMatching",
            Error::BracketFailure(_) => "BracketFailure",
            Error::MonotonicityViolation { .. } => "MonotonicityViolation",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
