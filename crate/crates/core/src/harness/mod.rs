//! Closed-loop episodes, scenarios and the θ-convergence study.

mod autopilot;
mod convergence;
mod episode;
mod output;
mod scenario;

use serde::{Deserialize, Serialize};

use crate::atmosphere::AtmosphereConfig;
use crate::dynamics::AircraftConfig;
use crate::error::{Result, SimError};

pub use autopilot::{
    autopilot_action, heading_error_to_center, Autopilot, ControlIncrement, RELEASE_FRACTION,
};
pub use convergence::{
    adaptation_time, average_theta, convergence_study, distance_curve, estimate_theta_opt,
    ConvergenceReport, ThetaOptEstimate,
};
pub use episode::{
    run_episode, EpisodeOptions, EpisodeOutput, EpisodeSummary, ThetaSnapshot, TraceRecord,
};
pub use output::{write_summary_json, write_theta_csv, write_trace_csv, TRACE_HEADER};
pub use scenario::{Launch, Scenario, ScenarioKind, ScenarioScript, ScriptedEvent};

/// Simulation settings shared by every episode of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub atmosphere: AtmosphereConfig,
    pub aircraft: AircraftConfig,
    /// Control and integration period, s.
    pub dt: f64,
    /// Keep one trace record every `decimation` control steps.
    pub decimation: u64,
    /// Snapshot θ every `theta_period` control steps (0 disables).
    pub theta_period: u64,
    pub initial_altitude: f64,
    pub initial_airspeed: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            atmosphere: AtmosphereConfig::default(),
            aircraft: AircraftConfig::default(),
            dt: 0.001,
            decimation: 10,
            theta_period: 100,
            initial_altitude: 300.0,
            initial_airspeed: 15.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.atmosphere.validate()?;
        self.aircraft.validate()?;
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return Err(SimError::invalid("dt", "must lie in (0, 0.1] s"));
        }
        if self.decimation == 0 {
            return Err(SimError::invalid("decimation", "must be at least 1"));
        }
        if !(self.initial_altitude > 0.0) {
            return Err(SimError::invalid("initial_altitude", "must be positive"));
        }
        if self.initial_airspeed < self.aircraft.v_min {
            return Err(SimError::invalid(
                "initial_airspeed",
                "must not be below v_min",
            ));
        }
        Ok(())
    }

    /// Number of control steps covering `duration`.
    pub fn steps_for(&self, duration: f64) -> u64 {
        // guard against 299.99999 / 0.001 style round-off
        (duration / self.dt + 1e-9).floor() as u64
    }
}
