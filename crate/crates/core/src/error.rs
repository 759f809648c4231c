use alloc::string::String;

/// Errors raised by validation and by computations whose preconditions fail.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("value {value} at index {index} is not strictly inside (0, 1)")]
    OutOfUnitInterval { index: usize, value: f64 },
    #[error("value at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("kappa rule gives {kappa} at n = {n}, outside (0, 1/2)")]
    KappaOutOfRange { n: usize, kappa: f64 },
    #[error("{0}")]
    ConditionFails(String),
    #[error("numerical divergence: {0}")]
    Divergence(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_open_half(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 0.5 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in (0, 1/2)",
        })
    }
}
