//! Thermal-soaring glider simulator with an online Q-learning controller.
//!
//! * [`atmosphere`]: drifting, finite-life convective thermals with a
//!   mass-conserving environmental sink and Ornstein–Uhlenbeck wind noise.
//! * [`dynamics`]: point-mass glider equations of motion and an RK4 stepper.
//! * [`agent`]: ε-greedy Q-learning with linear quadratic features over
//!   `(ż, γ̇, μ, β)` and nine bank/sideslip increment actions.
//! * [`harness`]: closed-loop episodes, arena autopilot, scenarios and the
//!   θ-convergence study.
//! * [`config`]: the `key = value` run configuration.

pub mod agent;
pub mod atmosphere;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod rng;
pub mod selfcheck;

pub use error::{Result, SimError};
