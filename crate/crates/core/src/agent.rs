//! Online Q-learning controller.
//!
//! The observation is `(ż, γ̇, μ, β)`. Each component is squashed through a
//! symmetric sigmoid and expanded into the 15 monomials of degree ≤ 2. The
//! action-value function is linear in those features with one 15-weight
//! block per action, and actions are the nine `(±δμ | 0) × (±δβ | 0)`
//! increments of bank and sideslip.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{clamp_controls, AircraftConfig, ControlState};
use crate::error::{Result, SimError};

pub const N_FEATURES: usize = 15;
pub const N_ACTIONS: usize = 9;
pub const N_WEIGHTS: usize = N_FEATURES * N_ACTIONS;

pub type FeatureVector = [f64; N_FEATURES];

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub z_dot: f64,
    pub gamma_dot: f64,
    pub mu: f64,
    pub beta: f64,
}

impl Observation {
    fn components(&self) -> [f64; 4] {
        [self.z_dot, self.gamma_dot, self.mu, self.beta]
    }
}

/// One of the nine bank/sideslip increments.
///
/// `index = 3 * i_mu + i_beta` with `i = 0, 1, 2` standing for `-, 0, +`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action(u8);

impl Action {
    pub const HOLD: Action = Action(4);

    pub fn new(index: usize) -> Option<Action> {
        (index < N_ACTIONS).then_some(Action(index as u8))
    }

    pub fn from_signs(mu_sign: i8, beta_sign: i8) -> Action {
        debug_assert!((-1..=1).contains(&mu_sign) && (-1..=1).contains(&beta_sign));
        Action((3 * (mu_sign + 1) + (beta_sign + 1)) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Direction of the bank increment: -1, 0 or +1.
    pub fn mu_sign(self) -> f64 {
        (self.0 / 3) as f64 - 1.0
    }

    pub fn beta_sign(self) -> f64 {
        (self.0 % 3) as f64 - 1.0
    }

    pub fn all() -> impl Iterator<Item = Action> {
        (0..N_ACTIONS as u8).map(Action)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    /// Learning rate α.
    pub learning_rate: f64,
    /// Exploration rate ε.
    pub exploration: f64,
    /// Discount factor η.
    pub discount: f64,
    /// Bank increment per control step, rad.
    pub delta_mu: f64,
    /// Sideslip increment per control step, rad.
    pub delta_beta: f64,
    pub scale_z_dot: f64,
    pub scale_gamma_dot: f64,
    pub scale_mu: f64,
    pub scale_beta: f64,
    /// Standard deviation of additive Gaussian noise on `(ż, γ̇)`; 0 disables.
    pub observation_noise: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        let aircraft = AircraftConfig::default();
        AgentConfig {
            learning_rate: 0.001,
            exploration: 0.01,
            discount: 0.99,
            delta_mu: 0.003f64.to_radians(),
            delta_beta: 0.003f64.to_radians(),
            scale_z_dot: 3.0,
            scale_gamma_dot: 0.2,
            scale_mu: aircraft.mu_max,
            scale_beta: aircraft.beta_max,
            observation_noise: 0.0,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(SimError::invalid(
                "alpha",
                "learning rate must be finite and >= 0",
            ));
        }
        if !(0.0..=1.0).contains(&self.exploration) {
            return Err(SimError::invalid("epsilon", "must lie in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(SimError::invalid("eta", "must lie in [0, 1)"));
        }
        if !(self.delta_mu >= 0.0 && self.delta_beta >= 0.0) {
            return Err(SimError::invalid(
                "delta_mu",
                "increments must be non-negative",
            ));
        }
        for (name, c) in [
            ("scale_z_dot", self.scale_z_dot),
            ("scale_gamma_dot", self.scale_gamma_dot),
            ("scale_mu", self.scale_mu),
            ("scale_beta", self.scale_beta),
        ] {
            if !(c > 0.0 && c.is_finite()) {
                return Err(SimError::invalid(
                    name,
                    "normalization scale must be positive",
                ));
            }
        }
        if !(self.observation_noise >= 0.0) {
            return Err(SimError::invalid(
                "observation_noise",
                "must be non-negative",
            ));
        }
        Ok(())
    }
}

/// `2 / (1 + exp(-x / c)) - 1`, i.e. `tanh(x / 2c)`.
fn squash(x: f64, scale: f64) -> f64 {
    (0.5 * x / scale).tanh()
}

pub fn normalize(obs: &Observation, cfg: &AgentConfig) -> [f64; 4] {
    let scales = [
        cfg.scale_z_dot,
        cfg.scale_gamma_dot,
        cfg.scale_mu,
        cfg.scale_beta,
    ];
    let mut out = [0.0; 4];
    for ((o, x), c) in out.iter_mut().zip(obs.components()).zip(scales) {
        *o = squash(x, c);
    }
    out
}

/// Constant, the four linear terms, then the ten products `s_i s_j`
/// (`i <= j`) in row-major order.
pub fn features(obs: &Observation, cfg: &AgentConfig) -> FeatureVector {
    let s = normalize(obs, cfg);
    let mut phi = [0.0; N_FEATURES];
    phi[0] = 1.0;
    phi[1..5].copy_from_slice(&s);
    let mut k = 5;
    for i in 0..4 {
        for j in i..4 {
            phi[k] = s[i] * s[j];
            k += 1;
        }
    }
    phi
}

/// Linear action-value function with one weight block per action.
///
/// `Q(s, a) = θ_a · φ(s)`; the glider controller uses 9 blocks of 15.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearQ {
    n_actions: usize,
    n_features: usize,
    theta: Vec<f64>,
}

impl LinearQ {
    pub fn zeros(n_actions: usize, n_features: usize) -> Self {
        LinearQ {
            n_actions,
            n_features,
            theta: vec![0.0; n_actions * n_features],
        }
    }

    pub fn from_weights(n_actions: usize, n_features: usize, theta: Vec<f64>) -> Self {
        assert_eq!(theta.len(), n_actions * n_features);
        LinearQ {
            n_actions,
            n_features,
            theta,
        }
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn weights(&self) -> &[f64] {
        &self.theta
    }

    pub fn block(&self, action: usize) -> &[f64] {
        &self.theta[action * self.n_features..(action + 1) * self.n_features]
    }

    pub fn block_mut(&mut self, action: usize) -> &mut [f64] {
        &mut self.theta[action * self.n_features..(action + 1) * self.n_features]
    }

    pub fn value(&self, phi: &[f64], action: usize) -> f64 {
        self.block(action).iter().zip(phi).map(|(w, f)| w * f).sum()
    }

    pub fn max_value(&self, phi: &[f64]) -> f64 {
        (0..self.n_actions)
            .map(|a| self.value(phi, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy action with uniform tie-breaking among exact maximizers.
    pub fn greedy<R: Rng + ?Sized>(&self, phi: &[f64], rng: &mut R) -> usize {
        let mut best = f64::NEG_INFINITY;
        let mut ties = [0usize; 32];
        let mut n_ties = 0;
        for a in 0..self.n_actions {
            let q = self.value(phi, a);
            if q > best {
                best = q;
                ties[0] = a;
                n_ties = 1;
            } else if q == best && n_ties < ties.len() {
                ties[n_ties] = a;
                n_ties += 1;
            }
        }
        if n_ties > 1 {
            ties[rng.random_range(0..n_ties)]
        } else {
            ties[0]
        }
    }

    /// ε-greedy choice: greedy with probability `1 - epsilon`, otherwise a
    /// uniformly random action.
    pub fn epsilon_greedy<R: Rng + ?Sized>(&self, phi: &[f64], epsilon: f64, rng: &mut R) -> usize {
        if rng.random::<f64>() < epsilon {
            rng.random_range(0..self.n_actions)
        } else {
            self.greedy(phi, rng)
        }
    }

    /// Q-learning step `θ_a += α δ φ(s)` with
    /// `δ = r + η max_a' Q(s', a') - Q(s, a)`. Returns `δ`.
    pub fn td_update(
        &mut self,
        phi: &[f64],
        action: usize,
        reward: f64,
        phi_next: &[f64],
        learning_rate: f64,
        discount: f64,
    ) -> Result<f64> {
        let delta = reward + discount * self.max_value(phi_next) - self.value(phi, action);
        if !delta.is_finite() {
            return Err(SimError::Divergence);
        }
        let step = learning_rate * delta;
        for (w, f) in self.block_mut(action).iter_mut().zip(phi) {
            *w += step * f;
        }
        Ok(delta)
    }
}

/// The glider controller's weight vector θ (9 blocks of 15).
#[derive(Debug, Clone, PartialEq)]
pub struct AgentWeights(LinearQ);

impl Default for AgentWeights {
    fn default() -> Self {
        AgentWeights(LinearQ::zeros(N_ACTIONS, N_FEATURES))
    }
}

impl AgentWeights {
    pub fn from_theta(theta: Vec<f64>) -> Result<Self> {
        if theta.len() != N_WEIGHTS {
            return Err(SimError::invalid(
                "theta",
                format!("expected {N_WEIGHTS} weights, got {}", theta.len()),
            ));
        }
        Ok(AgentWeights(LinearQ::from_weights(
            N_ACTIONS, N_FEATURES, theta,
        )))
    }

    pub fn theta(&self) -> &[f64] {
        self.0.weights()
    }

    pub fn linear(&self) -> &LinearQ {
        &self.0
    }

    pub fn linear_mut(&mut self) -> &mut LinearQ {
        &mut self.0
    }
}

pub fn q_value(
    weights: &AgentWeights,
    obs: &Observation,
    action: Action,
    cfg: &AgentConfig,
) -> f64 {
    weights.0.value(&features(obs, cfg), action.index())
}

pub fn select_action<R: Rng + ?Sized>(
    weights: &AgentWeights,
    obs: &Observation,
    epsilon: f64,
    cfg: &AgentConfig,
    rng: &mut R,
) -> Action {
    let phi = features(obs, cfg);
    Action(weights.0.epsilon_greedy(&phi, epsilon, rng) as u8)
}

/// Applies one Q-learning update for the transition `(obs, action, reward,
/// next_obs)` and returns the temporal-difference error.
pub fn td_update(
    weights: &mut AgentWeights,
    obs: &Observation,
    action: Action,
    reward: f64,
    next_obs: &Observation,
    cfg: &AgentConfig,
) -> Result<f64> {
    let phi = features(obs, cfg);
    let phi_next = features(next_obs, cfg);
    weights.0.td_update(
        &phi,
        action.index(),
        reward,
        &phi_next,
        cfg.learning_rate,
        cfg.discount,
    )
}

/// Total specific-energy rate `ż + V V̇ / g`.
pub fn reward(z_dot: f64, v: f64, v_dot: f64, g: f64) -> f64 {
    z_dot + v * v_dot / g
}

/// Adds the action's increments to bank and sideslip, then saturates.
pub fn apply_action(
    ctrl: &ControlState,
    action: Action,
    cfg: &AgentConfig,
    aircraft: &AircraftConfig,
) -> ControlState {
    let moved = ControlState {
        alpha: ctrl.alpha,
        beta: ctrl.beta + action.beta_sign() * cfg.delta_beta,
        mu: ctrl.mu + action.mu_sign() * cfg.delta_mu,
    };
    clamp_controls(&moved, aircraft)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};
    use approx::assert_relative_eq;

    fn obs(z_dot: f64, gamma_dot: f64, mu: f64, beta: f64) -> Observation {
        Observation {
            z_dot,
            gamma_dot,
            mu,
            beta,
        }
    }

    #[test]
    fn action_index_bijection() {
        let mut seen = std::collections::HashSet::new();
        for a in Action::all() {
            let back = Action::from_signs(a.mu_sign() as i8, a.beta_sign() as i8);
            assert_eq!(back, a);
            seen.insert((a.mu_sign() as i8, a.beta_sign() as i8));
        }
        assert_eq!(seen.len(), 9);
        assert_eq!(Action::HOLD.mu_sign(), 0.0);
        assert_eq!(Action::HOLD.beta_sign(), 0.0);
        assert!(Action::new(9).is_none());
    }

    #[test]
    fn normalization_reference_values() {
        let cfg = AgentConfig::default();
        assert_eq!(normalize(&Observation::default(), &cfg), [0.0; 4]);
        let s = normalize(&obs(cfg.scale_z_dot, 0.0, 0.0, 0.0), &cfg);
        assert_relative_eq!(s[0], 2.0 / (1.0 + (-1.0f64).exp()) - 1.0, epsilon = 1e-15);
        assert_relative_eq!(s[0], 0.4621, epsilon = 1e-4);
        let big = normalize(&obs(1e6, 1e6, 1e6, 1e6), &cfg);
        assert!(big.iter().all(|&v| v <= 1.0 && v > 0.999));
    }

    #[test]
    fn features_layout() {
        let cfg = AgentConfig::default();
        let phi = features(&Observation::default(), &cfg);
        assert_eq!(phi.len(), 15);
        assert_eq!(phi[0], 1.0);
        assert!(phi[1..].iter().all(|&f| f == 0.0));

        let o = obs(1.0, -0.1, 0.2, 0.05);
        let s = normalize(&o, &cfg);
        let phi = features(&o, &cfg);
        assert_eq!(&phi[1..5], &s);
        assert_eq!(phi[5], s[0] * s[0]);
        assert_eq!(phi[8], s[0] * s[3]);
        assert_eq!(phi[9], s[1] * s[1]);
        assert_eq!(phi[12], s[2] * s[2]);
        assert_eq!(phi[14], s[3] * s[3]);
    }

    #[test]
    fn q_value_with_single_constant_weight() {
        let cfg = AgentConfig::default();
        let mut w = AgentWeights::default();
        assert_eq!(
            q_value(&w, &obs(1.0, 2.0, 0.1, 0.1), Action::HOLD, &cfg),
            0.0
        );
        w.linear_mut().block_mut(4)[0] = 2.5;
        for o in [Observation::default(), obs(-3.0, 0.4, -0.3, 0.2)] {
            assert_eq!(q_value(&w, &o, Action::new(4).unwrap(), &cfg), 2.5);
        }
    }

    #[test]
    fn greedy_picks_unique_maximizer() {
        let cfg = AgentConfig::default();
        let mut w = AgentWeights::default();
        w.linear_mut().block_mut(7)[0] = 1.0;
        let mut rng = stream(1, Stream::Exploration);
        for _ in 0..1000 {
            let a = select_action(&w, &obs(0.3, 0.0, 0.1, 0.0), 0.0, &cfg, &mut rng);
            assert_eq!(a.index(), 7);
        }
    }

    #[test]
    fn td_update_from_zero() {
        let cfg = AgentConfig::default();
        let mut w = AgentWeights::default();
        let a = Action::new(2).unwrap();
        let delta = td_update(
            &mut w,
            &Observation::default(),
            a,
            -0.7,
            &Observation::default(),
            &cfg,
        )
        .unwrap();
        assert_eq!(delta, -0.7);
        assert_relative_eq!(w.theta()[2 * 15], cfg.learning_rate * -0.7);
        let changed = w.theta().iter().filter(|&&x| x != 0.0).count();
        assert_eq!(changed, 1);

        let mut w = AgentWeights::default();
        td_update(
            &mut w,
            &obs(1.0, 0.1, 0.2, 0.3),
            a,
            0.0,
            &obs(1.0, 0.0, 0.0, 0.0),
            &cfg,
        )
        .unwrap();
        assert_eq!(w, AgentWeights::default());
    }

    #[test]
    fn td_update_flags_divergence() {
        let cfg = AgentConfig::default();
        let mut w = AgentWeights::default();
        let r = td_update(
            &mut w,
            &Observation::default(),
            Action::HOLD,
            f64::NAN,
            &Observation::default(),
            &cfg,
        );
        assert_eq!(r, Err(SimError::Divergence));
    }

    #[test]
    fn reward_reference_values() {
        assert_eq!(reward(-1.0, 15.0, 0.0, 9.81), -1.0);
        assert_relative_eq!(reward(2.0, 15.0, 0.1, 9.81), 2.0 + 1.5 / 9.81);
        assert_relative_eq!(reward(2.0, 15.0, 0.1, 9.81), 2.1529, epsilon = 1e-4);
    }

    #[test]
    fn apply_action_increments_and_saturates() {
        let cfg = AgentConfig::default();
        let aircraft = AircraftConfig::default();
        let up = Action::from_signs(1, 0);
        let mut c = ControlState::default();
        for _ in 0..1000 {
            c = apply_action(&c, up, &cfg, &aircraft);
        }
        assert_relative_eq!(c.mu.to_degrees(), 3.0, epsilon = 1e-9);
        assert_eq!(c.beta, 0.0);
        assert_eq!(apply_action(&c, Action::HOLD, &cfg, &aircraft), c);
        let top = ControlState {
            mu: aircraft.mu_max,
            ..c
        };
        assert_eq!(apply_action(&top, up, &cfg, &aircraft).mu, aircraft.mu_max);
    }

    #[test]
    fn config_validation() {
        let bad = AgentConfig {
            exploration: 1.5,
            ..AgentConfig::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(SimError::InvalidParameter {
                name: "epsilon",
                ..
            })
        ));
        assert!(AgentConfig::default().validate().is_ok());
    }
}
