use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge after {iterations} iterations (last x = {last_x})")]
    MaxIterExceeded { iterations: usize, last_x: f64 },

    #[error("objective is not finite at x = {x}")]
    NonFinite { x: f64 },

    #[error("quadrature tolerance {tol} not reached on [{a}, {b}]")]
    ToleranceNotReached { a: f64, b: f64, tol: f64 },

    #[error("hazard sequence has {len} entries but maturity needs {needed}")]
    HazardTooShort { len: usize, needed: usize },

    #[error("default probability of 1 makes the {0} undefined")]
    DegenerateHazard(&'static str),

    #[error("no yield solves the price equation: {0}")]
    NoSolution(String),

    #[error("premium leg is not positive ({0})")]
    ZeroPremiumLeg(f64),

    #[error("no intensity in [0, {lambda_max}] reprices the bond maturing at {maturity}")]
    NoRootInRange { maturity: f64, lambda_max: f64 },

    #[error("quote maturities must be strictly ascending ({previous} then {next})")]
    NonMonotoneMaturities { previous: f64, next: f64 },

    #[error("curve cell (maturity {maturity}, coupon rate {coupon_rate}): {source}")]
    Cell {
        maturity: f64,
        coupon_rate: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput { field, reason: reason.into() }
    }

    /// True for errors caused by malformed inputs rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidInput { .. }
            | Error::InvalidBracket { .. }
            | Error::HazardTooShort { .. }
            | Error::NonMonotoneMaturities { .. } => true,
            Error::Cell { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
