use serde::{Deserialize, Serialize};

use super::autopilot::{autopilot_action, Autopilot};
use super::scenario::{Scenario, ScriptedEvent};
use super::SimConfig;
use crate::agent::{self, Action, AgentConfig, AgentWeights, Observation};
use crate::atmosphere::{AtmosphereField, WindVector};
use crate::dynamics::{
    clamp_controls, integrate_step, state_derivative, total_energy, AircraftState, ControlState,
};
use crate::error::{Result, SimError};
use crate::rng::{self, SimRng, Stream};

use rand::Rng;
use rand_distr::StandardNormal;

/// One logged control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v: f64,
    pub gamma: f64,
    pub chi: f64,
    pub mu: f64,
    pub beta: f64,
    /// Index of the learner's action, or `None` while the autopilot flies.
    pub action: Option<u8>,
    pub reward: f64,
    pub energy: f64,
    pub wind: WindVector,
    pub autopilot: bool,
    /// Whether the glider is inside an active thermal's updraft disc (`r < r2`).
    pub in_updraft: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSnapshot {
    pub step: u64,
    pub t: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub scenario: String,
    pub seed: u64,
    pub steps: u64,
    pub flight_time: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Σ r·dt over the episode.
    pub reward_integral: f64,
    pub mean_reward: f64,
    pub time_in_updraft_fraction: f64,
    pub autopilot_fraction: f64,
    pub stall_clamps: u64,
    pub adaptation_time: Option<f64>,
    pub abort_reason: Option<String>,
}

#[derive(Debug, Clone)]
pub struct EpisodeOutput {
    pub trace: Vec<TraceRecord>,
    pub theta_history: Vec<ThetaSnapshot>,
    pub summary: EpisodeSummary,
    pub weights: AgentWeights,
    pub final_state: AircraftState,
}

/// Per-episode switches that are not part of the run configuration.
#[derive(Debug, Clone)]
pub struct EpisodeOptions {
    pub record_trace: bool,
    /// Starting weights; zeros when `None`.
    pub initial_weights: Option<AgentWeights>,
}

impl Default for EpisodeOptions {
    fn default() -> Self {
        EpisodeOptions {
            record_trace: true,
            initial_weights: None,
        }
    }
}

struct Sensors {
    noise_sigma: f64,
    rng: SimRng,
}

impl Sensors {
    fn observe(&mut self, z_dot: f64, gamma_dot: f64, ctrl: &ControlState) -> Observation {
        let mut obs = Observation {
            z_dot,
            gamma_dot,
            mu: ctrl.mu,
            beta: ctrl.beta,
        };
        if self.noise_sigma > 0.0 {
            obs.z_dot += self.noise_sigma * self.rng.sample::<f64, _>(StandardNormal);
            obs.gamma_dot += self.noise_sigma * self.rng.sample::<f64, _>(StandardNormal);
        }
        obs
    }
}

/// Runs one closed-loop episode.
///
/// Each control step observes `(ż, γ̇, μ, β)`, picks an ε-greedy action (or
/// lets the autopilot fly when outside the arena), integrates the dynamics
/// over `dt`, advances the atmosphere, scores the energy rate and applies
/// the Q-learning update. Learning and exploration are suspended while the
/// autopilot is engaged. A ground impact ends the episode early and is
/// reported in the summary.
pub fn run_episode(
    scenario: &Scenario,
    sim: &SimConfig,
    agent_cfg: &AgentConfig,
    seed: u64,
    options: &EpisodeOptions,
) -> Result<EpisodeOutput> {
    sim.validate()?;
    agent_cfg.validate()?;
    scenario.validate()?;

    let aircraft = &sim.aircraft;
    let g = aircraft.gravity;
    let dt = sim.dt;
    let steps = sim.steps_for(scenario.duration);

    let mut field: AtmosphereField = scenario.build_field(sim, seed)?;
    let mut events = scenario.events();
    let mut explore_rng = rng::stream(seed, Stream::Exploration);
    let mut sensors = Sensors {
        noise_sigma: agent_cfg.observation_noise,
        rng: rng::stream(seed, Stream::ObservationNoise),
    };
    let mut weights = options.initial_weights.clone().unwrap_or_default();
    let mut autopilot = Autopilot::new(sim.atmosphere.arena_radius);

    let launch = scenario.launch(sim);
    let alpha_trim = aircraft.trim_alpha();
    let (_, gamma_trim) = aircraft.steady_glide(alpha_trim);
    let mut state = AircraftState {
        x: launch.x,
        y: launch.y,
        z: sim.initial_altitude,
        v: sim.initial_airspeed,
        gamma: gamma_trim,
        chi: launch.chi,
    };
    let mut ctrl = ControlState {
        alpha: alpha_trim,
        beta: 0.0,
        mu: 0.0,
    };

    let wind0 = field.wind_at(state.x, state.y, state.z, 0.0);
    let rate0 = state_derivative(&state, &ctrl, &wind0, aircraft)?;
    let mut obs = sensors.observe(rate0.z, rate0.gamma, &ctrl);

    let initial_energy = total_energy(&state, g);
    let mut trace = Vec::with_capacity(if options.record_trace {
        (steps / sim.decimation) as usize
    } else {
        0
    });
    let mut theta_history = vec![ThetaSnapshot {
        step: 0,
        t: 0.0,
        theta: weights.theta().to_vec(),
    }];

    let mut reward_integral = 0.0;
    let mut in_updraft_steps = 0u64;
    let mut autopilot_steps = 0u64;
    let mut stall_clamps = 0u64;
    let mut abort_reason = None;
    let mut done = 0u64;

    for k in 0..steps {
        let t = k as f64 * dt;

        let ap = autopilot.update(&state);
        let action = if ap {
            let inc = autopilot_action(
                &state,
                &ctrl,
                aircraft.mu_max,
                agent_cfg.delta_mu,
                agent_cfg.delta_beta,
            );
            ctrl = clamp_controls(
                &ControlState {
                    alpha: ctrl.alpha,
                    beta: ctrl.beta + inc.d_beta,
                    mu: ctrl.mu + inc.d_mu,
                },
                aircraft,
            );
            None
        } else {
            let a = agent::select_action(
                &weights,
                &obs,
                agent_cfg.exploration,
                agent_cfg,
                &mut explore_rng,
            );
            ctrl = agent::apply_action(&ctrl, a, agent_cfg, aircraft);
            Some(a)
        };

        let step = {
            let field = &field;
            integrate_step(
                &state,
                &ctrl,
                |x, y, z, t| field.wind_at(x, y, z, t),
                t,
                dt,
                aircraft,
            )?
        };
        if step.stall_clamped {
            stall_clamps += 1;
        }
        state = step.state;

        field.step(t, dt);
        let t_next = t + dt;
        events.retain(|ev| match *ev {
            ScriptedEvent::Expire { index, t: at } if at <= t_next => {
                field.expire_thermal(index, at);
                false
            }
            _ => true,
        });

        let wind = field.wind_at(state.x, state.y, state.z, t_next);
        let rate = state_derivative(&state, &ctrl, &wind, aircraft)?;
        let r = agent::reward(rate.z, state.v, rate.v, g);
        let next_obs = sensors.observe(rate.z, rate.gamma, &ctrl);

        if let Some(a) = action {
            agent::td_update(&mut weights, &obs, a, r, &next_obs, agent_cfg)?;
        }
        obs = next_obs;
        reward_integral += r * dt;
        done = k + 1;

        let in_updraft = field
            .thermal_containing(state.x, state.y, state.z, t_next, true)
            .is_some();
        in_updraft_steps += u64::from(in_updraft);
        autopilot_steps += u64::from(ap);

        if options.record_trace && done.is_multiple_of(sim.decimation) {
            trace.push(TraceRecord {
                t: t_next,
                x: state.x,
                y: state.y,
                z: state.z,
                v: state.v,
                gamma: state.gamma,
                chi: state.chi,
                mu: ctrl.mu,
                beta: ctrl.beta,
                action: action.map(|a: Action| a.index() as u8),
                reward: r,
                energy: total_energy(&state, g),
                wind,
                autopilot: ap,
                in_updraft,
            });
        }
        if sim.theta_period > 0 && done.is_multiple_of(sim.theta_period) {
            theta_history.push(ThetaSnapshot {
                step: done,
                t: t_next,
                theta: weights.theta().to_vec(),
            });
        }
        if state.z <= 0.0 {
            abort_reason = Some(SimError::GroundImpact { t: t_next }.to_string());
            break;
        }
    }

    let flight_time = done as f64 * dt;
    let summary = EpisodeSummary {
        scenario: scenario.kind.to_string(),
        seed,
        steps: done,
        flight_time,
        initial_energy,
        final_energy: total_energy(&state, g),
        reward_integral,
        mean_reward: if flight_time > 0.0 {
            reward_integral / flight_time
        } else {
            0.0
        },
        time_in_updraft_fraction: in_updraft_steps as f64 / done.max(1) as f64,
        autopilot_fraction: autopilot_steps as f64 / done.max(1) as f64,
        stall_clamps,
        adaptation_time: None,
        abort_reason,
    };
    Ok(EpisodeOutput {
        trace,
        theta_history,
        summary,
        weights,
        final_state: state,
    })
}
