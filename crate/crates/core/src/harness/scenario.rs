//! The four flight scenarios and the scripted thermals they place.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SimConfig;
use crate::atmosphere::{AtmosphereField, ThermalParams};
use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// No thermals, wind noise only.
    StillAir,
    /// A thermal appears ahead of the glider's path after a latency phase.
    ThermalBirth,
    /// The glider starts inside a mature thermal that dies at a scripted time.
    ThermalDeath,
    /// Randomly spawned, drifting, respawning thermal population.
    MultiThermal,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::StillAir,
        ScenarioKind::ThermalBirth,
        ScenarioKind::ThermalDeath,
        ScenarioKind::MultiThermal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::StillAir => "still-air",
            ScenarioKind::ThermalBirth => "thermal-birth",
            ScenarioKind::ThermalDeath => "thermal-death",
            ScenarioKind::MultiThermal => "multi-thermal",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SimError::invalid("scenario", format!("unknown scenario `{s}`")))
    }
}

/// Timing and placement of the scripted thermal events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioScript {
    /// Time at which the latency phase of the born thermal ends, s.
    pub birth_time: f64,
    /// Distance of the born thermal ahead of the glider's extrapolated
    /// position at `birth_time`, m.
    pub birth_ahead: f64,
    /// Time at which the occupied thermal is killed, s.
    pub death_time: f64,
    /// Life-cycle duration of scripted thermals, s.
    pub thermal_life: f64,
    /// Shape parameter of scripted thermals.
    pub thermal_xi: f64,
    pub thermal_w_star: f64,
    pub thermal_z_i: f64,
}

impl Default for ScenarioScript {
    fn default() -> Self {
        ScenarioScript {
            birth_time: 30.0,
            birth_ahead: 200.0,
            death_time: 150.0,
            thermal_life: 600.0,
            thermal_xi: 0.5,
            thermal_w_star: 2.56,
            thermal_z_i: 1401.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub duration: f64,
    pub seed: u64,
    pub script: ScenarioScript,
}

/// Initial horizontal placement of the glider.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Launch {
    pub x: f64,
    pub y: f64,
    pub chi: f64,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, duration: f64, seed: u64) -> Self {
        Scenario {
            kind,
            duration,
            seed,
            script: ScenarioScript::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(SimError::invalid("duration", "must be positive"));
        }
        let s = &self.script;
        if !(s.birth_time >= 0.0
            && s.death_time > 0.0
            && s.thermal_life > 0.0
            && s.thermal_xi > 0.0)
        {
            return Err(SimError::invalid(
                "scenario",
                "scripted times must be positive",
            ));
        }
        if !(s.thermal_w_star > 0.0 && s.thermal_z_i > 0.0) {
            return Err(SimError::invalid(
                "scenario",
                "scripted thermal strength must be positive",
            ));
        }
        Ok(())
    }

    /// Where the glider starts.
    pub fn launch(&self, sim: &SimConfig) -> Launch {
        match self.kind {
            // Enter from the west so that the born thermal lies well inside
            // the arena when the glider reaches it.
            ScenarioKind::ThermalBirth => Launch {
                x: -0.8 * sim.atmosphere.arena_radius,
                y: 0.0,
                chi: 0.0,
            },
            _ => Launch {
                x: 0.0,
                y: 0.0,
                chi: 0.0,
            },
        }
    }

    fn scripted_thermal(
        &self,
        x: f64,
        y: f64,
        t_birth: f64,
        t_off: f64,
        t_life: f64,
    ) -> ThermalParams {
        ThermalParams {
            x_th: x,
            y_th: y,
            w_star: self.script.thermal_w_star,
            z_i: self.script.thermal_z_i,
            v_drift_x: 0.0,
            v_drift_y: 0.0,
            t_birth,
            t_off,
            t_life,
            xi: self.script.thermal_xi,
        }
    }

    /// Builds the atmosphere realization for this scenario.
    pub fn build_field(&self, sim: &SimConfig, seed: u64) -> Result<AtmosphereField> {
        self.validate()?;
        let atmo = sim.atmosphere.clone();
        let launch = self.launch(sim);
        match self.kind {
            ScenarioKind::StillAir => AtmosphereField::scripted(atmo, Vec::new(), seed, false),
            ScenarioKind::ThermalBirth => {
                // straight-line extrapolation at the initial airspeed
                let reach = sim.initial_airspeed * self.script.birth_time + self.script.birth_ahead;
                let x = launch.x + reach * launch.chi.cos();
                let y = launch.y + reach * launch.chi.sin();
                let th = self.scripted_thermal(
                    x,
                    y,
                    0.0,
                    self.script.birth_time,
                    self.script.thermal_life,
                );
                AtmosphereField::scripted(atmo, vec![th], seed, false)
            }
            ScenarioKind::ThermalDeath => {
                // Mature at t = 0: start the clock at the bump's peak
                // tau* = xi / (xi + 1). The scripted death cuts it short.
                let xi = self.script.thermal_xi;
                let life = self.script.thermal_life;
                let elapsed = xi / (xi + 1.0) * life;
                let th = self.scripted_thermal(launch.x, launch.y, -elapsed, 0.0, life);
                AtmosphereField::scripted(atmo, vec![th], seed, false)
            }
            ScenarioKind::MultiThermal => AtmosphereField::new(atmo, seed, 0.0),
        }
    }
}

/// A scripted change to the atmosphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScriptedEvent {
    /// Kill thermal `index` at time `t`.
    Expire { index: usize, t: f64 },
}

impl Scenario {
    pub fn events(&self) -> Vec<ScriptedEvent> {
        match self.kind {
            ScenarioKind::ThermalDeath => vec![ScriptedEvent::Expire {
                index: 0,
                t: self.script.death_time,
            }],
            _ => Vec::new(),
        }
    }
}
