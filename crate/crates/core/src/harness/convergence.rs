//! Empirical θ_opt estimation and the ‖θ_t − θ̂_opt‖₂ roll-out study.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::episode::{run_episode, EpisodeOptions, ThetaSnapshot};
use super::{Scenario, SimConfig};
use crate::agent::AgentConfig;
use crate::error::{Result, SimError};
use crate::rng::rollout_seed;

/// Relative drift of θ across the post-settle window above which the
/// estimate is reported as unstable.
pub const STABILITY_THRESHOLD: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaOptEstimate {
    pub theta: Vec<f64>,
    /// `‖mean(second half) − mean(first half)‖ / ‖θ̂‖` over the post-settle
    /// window.
    pub drift: f64,
    pub stable: bool,
    pub samples: usize,
}

/// Averages the snapshots taken at or after `settle_time` across all
/// histories.
pub fn average_theta(
    histories: &[Vec<ThetaSnapshot>],
    settle_time: f64,
) -> Result<ThetaOptEstimate> {
    let windows: Vec<Vec<&ThetaSnapshot>> = histories
        .iter()
        .map(|h| h.iter().filter(|s| s.t >= settle_time).collect())
        .collect();
    let n_weights = histories
        .iter()
        .flat_map(|h| h.first())
        .map(|s| s.theta.len())
        .next()
        .ok_or_else(|| SimError::invalid("theta_history", "no snapshots"))?;

    // Running means stay exact when every sample is identical.
    let mut theta = vec![0.0; n_weights];
    let mut first = vec![0.0; n_weights];
    let mut second = vec![0.0; n_weights];
    let (mut n, mut n_first, mut n_second) = (0usize, 0usize, 0usize);
    for w in &windows {
        let half = w.len() / 2;
        for (i, snap) in w.iter().enumerate() {
            let (acc, count) = if i < half {
                (&mut first, &mut n_first)
            } else {
                (&mut second, &mut n_second)
            };
            n += 1;
            *count += 1;
            for ((m, a), x) in theta.iter_mut().zip(acc.iter_mut()).zip(&snap.theta) {
                *m += (x - *m) / n as f64;
                *a += (x - *a) / *count as f64;
            }
        }
    }
    if n == 0 {
        return Err(SimError::invalid(
            "settle_time",
            "no snapshots after the settle time",
        ));
    }
    let norm = l2(&theta);
    let drift = if n_first > 0 && n_second > 0 {
        let diff: Vec<f64> = first.iter().zip(&second).map(|(a, b)| b - a).collect();
        if norm > 0.0 {
            l2(&diff) / norm
        } else {
            l2(&diff)
        }
    } else {
        0.0
    };
    Ok(ThetaOptEstimate {
        theta,
        drift,
        stable: drift <= STABILITY_THRESHOLD,
        samples: n,
    })
}

/// Runs `n_runs` episodes of `scenario` and averages θ after `settle_time`.
pub fn estimate_theta_opt(
    scenario: &Scenario,
    sim: &SimConfig,
    agent: &AgentConfig,
    n_runs: usize,
    settle_time: f64,
    seed: u64,
) -> Result<ThetaOptEstimate> {
    if !(settle_time < scenario.duration) {
        return Err(SimError::invalid(
            "settle_time",
            "must be shorter than the episode",
        ));
    }
    if n_runs == 0 {
        return Err(SimError::invalid("n_runs", "must be at least 1"));
    }
    let histories = (0..n_runs as u64)
        .into_par_iter()
        .map(|i| {
            let opts = EpisodeOptions {
                record_trace: false,
                ..EpisodeOptions::default()
            };
            run_episode(scenario, sim, agent, rollout_seed(seed, i), &opts).map(|o| o.theta_history)
        })
        .collect::<Result<Vec<_>>>()?;
    let estimate = average_theta(&histories, settle_time)?;
    if !estimate.stable {
        log::warn!(
            "theta estimate for {} drifts by {:.1}% across the settle window",
            scenario.kind,
            100.0 * estimate.drift
        );
    }
    Ok(estimate)
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖θ_t − θ_opt‖₂` for every snapshot.
pub fn distance_curve(history: &[ThetaSnapshot], theta_opt: &[f64]) -> Vec<f64> {
    history
        .iter()
        .map(|s| {
            s.theta
                .iter()
                .zip(theta_opt)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// First time at which `mean` falls to `fraction` of its initial value.
pub fn adaptation_time(times: &[f64], mean: &[f64], fraction: f64) -> Option<f64> {
    let initial = *mean.first()?;
    times
        .iter()
        .zip(mean)
        .find(|(_, &m)| m <= fraction * initial)
        .map(|(&t, _)| t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scenario: String,
    pub n_rollouts: usize,
    pub threshold_fraction: f64,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub adaptation_time: Option<f64>,
    /// Roll-outs that ended early (ground impact); their curves are truncated.
    pub aborted: usize,
}

impl ConvergenceReport {
    /// Aggregates per-roll-out distance curves sampled at common `times`.
    /// Bins past a truncated curve's end use only the roll-outs still flying.
    pub fn from_curves(
        scenario: String,
        times: Vec<f64>,
        curves: &[Vec<f64>],
        threshold_fraction: f64,
        aborted: usize,
    ) -> Result<Self> {
        if curves.len() < 2 {
            return Err(SimError::invalid(
                "n_rollouts",
                "need at least 2 roll-outs for a spread",
            ));
        }
        let mut mean = Vec::with_capacity(times.len());
        let mut std = Vec::with_capacity(times.len());
        let mut kept_times = Vec::with_capacity(times.len());
        for (i, &t) in times.iter().enumerate() {
            let col: Vec<f64> = curves.iter().filter_map(|c| c.get(i).copied()).collect();
            if col.is_empty() {
                break;
            }
            let m = col.iter().sum::<f64>() / col.len() as f64;
            let var = if col.len() > 1 {
                col.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (col.len() - 1) as f64
            } else {
                0.0
            };
            kept_times.push(t);
            mean.push(m);
            std.push(var.sqrt());
        }
        let adaptation = adaptation_time(&kept_times, &mean, threshold_fraction);
        Ok(ConvergenceReport {
            scenario,
            n_rollouts: curves.len(),
            threshold_fraction,
            times: kept_times,
            mean,
            std,
            adaptation_time: adaptation,
            aborted,
        })
    }
}

/// Runs `n_rollouts` independent episodes (in parallel) and reports the
/// mean and spread of `‖θ_t − θ_opt‖₂` over time.
pub fn convergence_study(
    scenario: &Scenario,
    sim: &SimConfig,
    agent: &AgentConfig,
    theta_opt: &[f64],
    n_rollouts: usize,
    threshold_fraction: f64,
    seed: u64,
) -> Result<ConvergenceReport> {
    if n_rollouts < 2 {
        return Err(SimError::invalid(
            "n_rollouts",
            "need at least 2 roll-outs for a spread",
        ));
    }
    let runs = (0..n_rollouts as u64)
        .into_par_iter()
        .map(|i| {
            let opts = EpisodeOptions {
                record_trace: false,
                ..EpisodeOptions::default()
            };
            run_episode(scenario, sim, agent, rollout_seed(seed, i), &opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let longest = runs
        .iter()
        .max_by_key(|r| r.theta_history.len())
        .expect("at least two roll-outs");
    let times: Vec<f64> = longest.theta_history.iter().map(|s| s.t).collect();
    let curves: Vec<Vec<f64>> = runs
        .iter()
        .map(|r| distance_curve(&r.theta_history, theta_opt))
        .collect();
    let aborted = runs
        .iter()
        .filter(|r| r.summary.abort_reason.is_some())
        .count();
    ConvergenceReport::from_curves(
        scenario.kind.to_string(),
        times,
        &curves,
        threshold_fraction,
        aborted,
    )
}
