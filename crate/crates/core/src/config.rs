//! Run configuration: a plain-text file of `key = value` lines.
//!
//! Blank lines and `#` comments are ignored. Every key is optional; unset
//! keys take the defaults listed in [`RunConfig::default`]. Angles are given
//! in degrees (keys ending in `_deg`). Unknown keys, repeated keys,
//! malformed lines and out-of-range values are rejected with their line
//! number.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::agent::AgentConfig;
use crate::atmosphere::{AtmosphereConfig, Span};
use crate::dynamics::{AircraftConfig, STANDARD_GRAVITY};
use crate::error::SimError;
use crate::harness::{Scenario, ScenarioKind, ScenarioScript, SimConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: `{key}`: {reason}")]
    Value {
        line: usize,
        key: String,
        reason: String,
    },
    #[error(transparent)]
    Inconsistent(#[from] SimError),
}

type Check<T> = fn(&T) -> Result<(), String>;

fn any<T>(_: &T) -> Result<(), String> {
    Ok(())
}

fn positive(v: &f64) -> Result<(), String> {
    if *v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(v: &f64) -> Result<(), String> {
    if *v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}

fn finite(v: &f64) -> Result<(), String> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(format!("must be finite, got {v}"))
    }
}

fn unit_interval(v: &f64) -> Result<(), String> {
    if (0.0..=1.0).contains(v) {
        Ok(())
    } else {
        Err(format!("must lie in [0, 1], got {v}"))
    }
}

fn discount(v: &f64) -> Result<(), String> {
    if (0.0..1.0).contains(v) {
        Ok(())
    } else {
        Err(format!("must lie in [0, 1), got {v}"))
    }
}

fn open_unit(v: &f64) -> Result<(), String> {
    if *v > 0.0 && *v < 1.0 {
        Ok(())
    } else {
        Err(format!("must lie in (0, 1), got {v}"))
    }
}

fn right_angle(v: &f64) -> Result<(), String> {
    if *v > 0.0 && *v < 90.0 {
        Ok(())
    } else {
        Err(format!("must lie in (0, 90) degrees, got {v}"))
    }
}

fn at_least_one(v: &u64) -> Result<(), String> {
    if *v >= 1 {
        Ok(())
    } else {
        Err("must be at least 1".into())
    }
}

fn at_least_two(v: &usize) -> Result<(), String> {
    if *v >= 2 {
        Ok(())
    } else {
        Err(format!("must be at least 2, got {v}"))
    }
}

fn time_step(v: &f64) -> Result<(), String> {
    if *v > 0.0 && *v <= 0.1 {
        Ok(())
    } else {
        Err(format!("must lie in (0, 0.1] s, got {v}"))
    }
}

fn non_empty(v: &String) -> Result<(), String> {
    if v.trim().is_empty() {
        Err("must not be empty".into())
    } else {
        Ok(())
    }
}

macro_rules! run_config {
    ($( $(#[$doc:meta])* $key:ident : $ty:ty = $default:expr, $check:expr; )*) => {
        /// Every tunable of a run, as written in the configuration file.
        #[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
        pub struct RunConfig {
            $( $(#[$doc])* pub $key: $ty, )*
        }

        impl Default for RunConfig {
            fn default() -> Self {
                RunConfig { $( $key: $default, )* }
            }
        }

        impl RunConfig {
            pub const KEYS: &'static [&'static str] = &[$( stringify!($key), )*];

            fn set(&mut self, key: &str, raw: &str) -> Option<Result<(), String>> {
                match key {
                    $( stringify!($key) => Some(
                        raw.parse::<$ty>()
                            .map_err(|e| format!("cannot parse `{raw}`: {e}"))
                            .and_then(|v| {
                                let check: Check<$ty> = $check;
                                check(&v)?;
                                self.$key = v;
                                Ok(())
                            }),
                    ), )*
                    _ => None,
                }
            }

            /// Renders every key, one `key = value` line each.
            pub fn emit(&self) -> String {
                let mut out = String::new();
                $( let _ = writeln!(out, "{} = {}", stringify!($key), self.$key); )*
                out
            }
        }
    };
}

run_config! {
    // atmosphere
    n_thermals: usize = 3, any;
    arena_radius: f64 = 550.0, positive;
    w_star_min: f64 = 1.5, positive;
    w_star_max: f64 = 3.5, positive;
    z_i_min: f64 = 1100.0, positive;
    z_i_max: f64 = 1700.0, positive;
    drift_min: f64 = -1.4, finite;
    drift_max: f64 = 1.4, finite;
    t_off_min: f64 = 0.0, non_negative;
    t_off_max: f64 = 60.0, non_negative;
    t_life_min: f64 = 120.0, positive;
    t_life_max: f64 = 600.0, positive;
    xi_min: f64 = 1.0, positive;
    xi_max: f64 = 4.0, positive;
    r_min: f64 = 10.0, positive;
    r_max: f64 = 150.0, positive;
    core_ratio: f64 = 0.5, open_unit;
    k_down: f64 = 0.3, non_negative;
    noise_sigma: f64 = 0.3, non_negative;
    noise_tau: f64 = 1.0, positive;
    // aircraft
    mass: f64 = 5.0, positive;
    wing_area: f64 = 0.9, positive;
    cl_alpha: f64 = 5.7, positive;
    alpha0_deg: f64 = -2.0, finite;
    cd0: f64 = 0.015, non_negative;
    k_induced: f64 = 0.025, non_negative;
    cy_beta: f64 = -0.3, finite;
    air_density: f64 = 1.225, positive;
    gravity: f64 = STANDARD_GRAVITY, positive;
    v_min: f64 = 8.0, positive;
    beta_max_deg: f64 = 45.0, right_angle;
    mu_max_deg: f64 = 25.0, right_angle;
    trim_airspeed: f64 = 15.0, positive;
    // learner
    alpha: f64 = 0.001, non_negative;
    epsilon: f64 = 0.01, unit_interval;
    eta: f64 = 0.99, discount;
    delta_mu_deg: f64 = 0.003, non_negative;
    delta_beta_deg: f64 = 0.003, non_negative;
    scale_z_dot: f64 = 3.0, positive;
    scale_gamma_dot: f64 = 0.2, positive;
    scale_mu_deg: f64 = 25.0, positive;
    scale_beta_deg: f64 = 45.0, positive;
    observation_noise: f64 = 0.0, non_negative;
    // simulation
    dt: f64 = 0.001, time_step;
    duration: f64 = 300.0, positive;
    decimation: u64 = 10, at_least_one;
    theta_period: u64 = 100, any;
    initial_altitude: f64 = 300.0, positive;
    initial_airspeed: f64 = 15.0, positive;
    seed: u64 = 1, any;
    // scripted scenarios
    scenario: ScenarioKind = ScenarioKind::StillAir, any;
    birth_time: f64 = 30.0, non_negative;
    birth_ahead: f64 = 200.0, finite;
    death_time: f64 = 150.0, positive;
    scripted_life: f64 = 600.0, positive;
    scripted_xi: f64 = 0.5, positive;
    scripted_w_star: f64 = 2.56, positive;
    scripted_z_i: f64 = 1401.0, positive;
    // convergence study
    rollouts: usize = 50, at_least_two;
    adaptation_threshold: f64 = 0.2, open_unit;
    settle_time: f64 = 200.0, non_negative;
    theta_opt_runs: usize = 16, any;
    // output
    out_dir: String = "out".to_string(), non_empty;
}

impl RunConfig {
    /// Parses configuration text; see the module docs for the format.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line,
                    text: raw_line.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Malformed {
                    line,
                    text: raw_line.to_string(),
                });
            }
            match cfg.set(key, value) {
                None => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
                Some(Err(reason)) => {
                    return Err(ConfigError::Value {
                        line,
                        key: key.to_string(),
                        reason,
                    })
                }
                Some(Ok(())) => {}
            }
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RunConfig, ConfigError> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Cross-key consistency (ranges with `min <= max` and the like).
    pub fn validate(&self) -> Result<(), SimError> {
        self.sim_config().validate()?;
        self.agent_config().validate()?;
        self.scenario_spec().validate()?;
        Ok(())
    }

    pub fn atmosphere_config(&self) -> AtmosphereConfig {
        AtmosphereConfig {
            n_thermals: self.n_thermals,
            arena_radius: self.arena_radius,
            w_star: Span::new(self.w_star_min, self.w_star_max),
            z_i: Span::new(self.z_i_min, self.z_i_max),
            drift: Span::new(self.drift_min, self.drift_max),
            t_off: Span::new(self.t_off_min, self.t_off_max),
            t_life: Span::new(self.t_life_min, self.t_life_max),
            xi: Span::new(self.xi_min, self.xi_max),
            r_min: self.r_min,
            r_max: self.r_max,
            core_ratio: self.core_ratio,
            k_down: self.k_down,
            noise_sigma: self.noise_sigma,
            noise_tau: self.noise_tau,
        }
    }

    pub fn aircraft_config(&self) -> AircraftConfig {
        AircraftConfig {
            mass: self.mass,
            wing_area: self.wing_area,
            cl_alpha: self.cl_alpha,
            alpha0: self.alpha0_deg.to_radians(),
            cd0: self.cd0,
            k_induced: self.k_induced,
            cy_beta: self.cy_beta,
            air_density: self.air_density,
            gravity: self.gravity,
            v_min: self.v_min,
            beta_max: self.beta_max_deg.to_radians(),
            mu_max: self.mu_max_deg.to_radians(),
            trim_airspeed: self.trim_airspeed,
        }
    }

    pub fn agent_config(&self) -> AgentConfig {
        AgentConfig {
            learning_rate: self.alpha,
            exploration: self.epsilon,
            discount: self.eta,
            delta_mu: self.delta_mu_deg.to_radians(),
            delta_beta: self.delta_beta_deg.to_radians(),
            scale_z_dot: self.scale_z_dot,
            scale_gamma_dot: self.scale_gamma_dot,
            scale_mu: self.scale_mu_deg.to_radians(),
            scale_beta: self.scale_beta_deg.to_radians(),
            observation_noise: self.observation_noise,
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            atmosphere: self.atmosphere_config(),
            aircraft: self.aircraft_config(),
            dt: self.dt,
            decimation: self.decimation,
            theta_period: self.theta_period,
            initial_altitude: self.initial_altitude,
            initial_airspeed: self.initial_airspeed,
        }
    }

    /// The scenario named by `scenario`, with this run's duration, seed and
    /// scripted-event settings.
    pub fn scenario_spec(&self) -> Scenario {
        Scenario {
            kind: self.scenario,
            duration: self.duration,
            seed: self.seed,
            script: self.scenario_script(),
        }
    }

    pub fn scenario_script(&self) -> ScenarioScript {
        ScenarioScript {
            birth_time: self.birth_time,
            birth_ahead: self.birth_ahead,
            death_time: self.death_time,
            thermal_life: self.scripted_life,
            thermal_xi: self.scripted_xi,
            thermal_w_star: self.scripted_w_star,
            thermal_z_i: self.scripted_z_i,
        }
    }
}
