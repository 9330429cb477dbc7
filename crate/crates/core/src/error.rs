use thiserror::Error;

/// Failures raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("stall: airspeed {airspeed:.3} m/s below the {v_min:.3} m/s guard")]
    Stall { airspeed: f64, v_min: f64 },

    #[error("flight-path singularity: cos(gamma) = {cos_gamma:e}")]
    Singularity { cos_gamma: f64 },

    #[error("ground impact at t = {t:.3} s")]
    GroundImpact { t: f64 },

    #[error("non-finite temporal-difference error")]
    Divergence,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl SimError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        SimError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
