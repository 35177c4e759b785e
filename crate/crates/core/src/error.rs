use thiserror::Error;

/// Errors produced by the friction toolkit.
#[derive(Debug, Error)]
pub enum FrictionError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty contact: the pressure distribution integrates to zero")]
    EmptyContact,

    #[error("skew iteration diverged after {iterations} iterations (last residual {residual:e})")]
    SkewDiverged { iterations: usize, residual: f64 },

    #[error(
        "stiffness limit at t = {time:e} s: step size {step:e} s underflowed; \
         use a smaller sigma1 / larger damping or fall back to fixed-step integration"
    )]
    StiffnessLimit { time: f64, step: f64 },

    #[error("integrator produced a non-finite state at t = {time:e} s")]
    NonFinite { time: f64 },

    #[error("negative normal force {value} N at t = {time} s")]
    NegativeNormalForce { time: f64, value: f64 },

    #[error("limit surface cache: {0}")]
    Cache(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FrictionError>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(FrictionError::InvalidParameter(msg()))
    }
}
