//! Arena containment: steers the glider back toward the arena center
//! whenever it leaves the disc, at the same increment rates the learner uses.

use crate::dynamics::{wrap_angle, AircraftState, ControlState};

/// Heading error (rad) at which the commanded bank saturates.
const HEADING_ERROR_SATURATION: f64 = 0.5;

/// Fraction of the arena radius below which an active autopilot releases.
pub const RELEASE_FRACTION: f64 = 0.95;

/// Bank and sideslip increments for one control step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ControlIncrement {
    pub d_mu: f64,
    pub d_beta: f64,
}

/// Hysteretic arena guard: engages beyond the arena radius, releases inside
/// `RELEASE_FRACTION` of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Autopilot {
    pub arena_radius: f64,
    pub active: bool,
}

impl Autopilot {
    pub fn new(arena_radius: f64) -> Self {
        Autopilot {
            arena_radius,
            active: false,
        }
    }

    /// Updates the engagement flag for the current position and returns it.
    pub fn update(&mut self, state: &AircraftState) -> bool {
        let d = state.horizontal_distance();
        if d > self.arena_radius {
            self.active = true;
        } else if d < RELEASE_FRACTION * self.arena_radius {
            self.active = false;
        }
        self.active
    }
}

fn toward(current: f64, target: f64, max_step: f64) -> f64 {
    (target - current).clamp(-max_step, max_step)
}

/// Course error to the arena center, positive when the center lies to the
/// left (counter-clockwise) of the current course.
pub fn heading_error_to_center(state: &AircraftState) -> f64 {
    wrap_angle((-state.y).atan2(-state.x) - state.chi)
}

/// Increments that walk sideslip to zero and bank toward
/// `mu_max * sat(heading error)`, one rate-limited step at a time.
pub fn autopilot_action(
    state: &AircraftState,
    ctrl: &ControlState,
    mu_max: f64,
    delta_mu: f64,
    delta_beta: f64,
) -> ControlIncrement {
    let error = heading_error_to_center(state);
    let mu_target = mu_max * (error / HEADING_ERROR_SATURATION).clamp(-1.0, 1.0);
    ControlIncrement {
        d_mu: toward(ctrl.mu, mu_target, delta_mu),
        d_beta: toward(ctrl.beta, 0.0, delta_beta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(x: f64, y: f64, chi: f64) -> AircraftState {
        AircraftState {
            x,
            y,
            z: 300.0,
            v: 15.0,
            gamma: 0.0,
            chi,
        }
    }

    #[test]
    fn hysteresis() {
        let mut ap = Autopilot::new(550.0);
        assert!(!ap.update(&at(100.0, 0.0, 0.0)));
        assert!(ap.update(&at(560.0, 0.0, 0.0)));
        assert!(ap.update(&at(540.0, 0.0, 0.0)));
        assert!(!ap.update(&at(520.0, 0.0, 0.0)));
    }

    #[test]
    fn center_dead_ahead_unwinds_bank() {
        let ctrl = ControlState {
            alpha: 0.1,
            beta: 0.01,
            mu: 0.2,
        };
        let inc = autopilot_action(
            &at(600.0, 0.0, std::f64::consts::PI),
            &ctrl,
            0.436,
            1e-4,
            2e-4,
        );
        assert_eq!(inc.d_mu, -1e-4);
        assert_eq!(inc.d_beta, -2e-4);
    }

    #[test]
    fn turns_toward_center() {
        // heading north at (600, 0): the center is to the left
        let inc = autopilot_action(
            &at(600.0, 0.0, std::f64::consts::FRAC_PI_2),
            &ControlState::default(),
            0.436,
            1e-4,
            1e-4,
        );
        assert_eq!(inc.d_mu, 1e-4);
        assert_eq!(inc.d_beta, 0.0);
    }
}
