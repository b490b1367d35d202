use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A propagated matrix left the representable range.
    #[error("matrix entries exceed 1e250 at tau = {tau}")]
    Overflow { tau: f64 },

    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    #[error("ODE step size underflow at tau = {tau} (h = {step:e})")]
    StepSizeUnderflow { tau: f64, step: f64 },

    #[error("invalid covariance state: {0}")]
    InvalidState(String),

    #[error("{function} is undefined at lambda = {lambda}")]
    Domain { function: &'static str, lambda: f64 },

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("negativity never reaches {target:e} for tau in (0, {tau_max}]; max reached {max_reached:e}")]
    NoCrossing {
        target: f64,
        tau_max: f64,
        max_reached: f64,
    },

    #[error("no entanglement: eta = {eta:e} does not exceed mu = {mu:e}")]
    NoEntanglement { eta: f64, mu: f64 },

    #[error("displacement ratio dx/a_L = {ratio:e} is above 0.01; suppression estimate invalid")]
    SuppressionInvalid { ratio: f64 },

    #[error("geometries differ in {0}")]
    GeometryMismatch(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Checks `value > 0` and finite.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}
