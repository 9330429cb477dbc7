//! Point-mass glider model.
//!
//! `V`, `gamma` and `chi` are air-relative; wind enters the position rates
//! only (quasi-static wind, wind-acceleration terms neglected).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::atmosphere::WindVector;
use crate::error::{Result, SimError};

pub const STANDARD_GRAVITY: f64 = 9.81;

/// Threshold on `cos(gamma)` below which the course equation is singular.
const COS_GAMMA_FLOOR: f64 = 1e-6;

/// Aerodynamic and inertial coefficients. Defaults describe a ~5 kg glider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AircraftConfig {
    pub mass: f64,
    pub wing_area: f64,
    /// Lift slope, 1/rad.
    pub cl_alpha: f64,
    /// Zero-lift angle of attack, rad.
    pub alpha0: f64,
    pub cd0: f64,
    /// Induced drag factor in `C_D = C_D0 + k C_L²`.
    pub k_induced: f64,
    /// Side-force slope, 1/rad.
    pub cy_beta: f64,
    pub air_density: f64,
    pub gravity: f64,
    pub v_min: f64,
    pub beta_max: f64,
    pub mu_max: f64,
    /// Airspeed at which the frozen angle of attack holds level flight.
    pub trim_airspeed: f64,
}

impl Default for AircraftConfig {
    fn default() -> Self {
        AircraftConfig {
            mass: 5.0,
            wing_area: 0.9,
            cl_alpha: 5.7,
            alpha0: (-2.0f64).to_radians(),
            cd0: 0.015,
            k_induced: 0.025,
            cy_beta: -0.3,
            air_density: 1.225,
            gravity: STANDARD_GRAVITY,
            v_min: 8.0,
            beta_max: 45.0f64.to_radians(),
            mu_max: 25.0f64.to_radians(),
            trim_airspeed: 15.0,
        }
    }
}

impl AircraftConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("wing_area", self.wing_area),
            ("cl_alpha", self.cl_alpha),
            ("air_density", self.air_density),
            ("gravity", self.gravity),
            ("v_min", self.v_min),
            ("trim_airspeed", self.trim_airspeed),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SimError::invalid(name, "must be positive and finite"));
            }
        }
        if !(self.cd0 >= 0.0 && self.k_induced >= 0.0) {
            return Err(SimError::invalid(
                "cd0",
                "drag coefficients must be non-negative",
            ));
        }
        if !(self.beta_max > 0.0 && self.beta_max < PI / 2.0) {
            return Err(SimError::invalid("beta_max", "must lie in (0, 90) degrees"));
        }
        if !(self.mu_max > 0.0 && self.mu_max < PI / 2.0) {
            return Err(SimError::invalid("mu_max", "must lie in (0, 90) degrees"));
        }
        if self.trim_airspeed < self.v_min {
            return Err(SimError::invalid(
                "trim_airspeed",
                "must not be below v_min",
            ));
        }
        Ok(())
    }

    pub fn lift_coefficient(&self, alpha: f64) -> f64 {
        self.cl_alpha * (alpha - self.alpha0)
    }

    pub fn drag_coefficient(&self, alpha: f64) -> f64 {
        let cl = self.lift_coefficient(alpha);
        self.cd0 + self.k_induced * cl * cl
    }

    /// Angle of attack holding wings-level, unaccelerated flight at
    /// `trim_airspeed`.
    pub fn trim_alpha(&self) -> f64 {
        let cl = 2.0 * self.mass * self.gravity
            / (self.air_density * self.wing_area * self.trim_airspeed * self.trim_airspeed);
        self.alpha0 + cl / self.cl_alpha
    }

    /// Angle of attack maximizing `C_L / C_D`.
    pub fn best_glide_alpha(&self) -> f64 {
        self.alpha0 + (self.cd0 / self.k_induced).sqrt() / self.cl_alpha
    }

    /// Steady straight glide `(V, gamma)` at angle of attack `alpha`, from
    /// `V̇ = 0` and `γ̇ = 0` with `mu = beta = 0`.
    pub fn steady_glide(&self, alpha: f64) -> (f64, f64) {
        let cl = self.lift_coefficient(alpha);
        let cd = self.drag_coefficient(alpha);
        let gamma = (-cd / cl).atan();
        let v = (2.0 * self.mass * self.gravity * gamma.cos()
            / (self.air_density * self.wing_area * cl))
            .sqrt();
        (v, gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AircraftState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Airspeed, m/s.
    pub v: f64,
    /// Climb angle, rad.
    pub gamma: f64,
    /// Course angle, rad, in (-π, π].
    pub chi: f64,
}

impl AircraftState {
    fn offset(&self, d: &StateRate, h: f64) -> AircraftState {
        AircraftState {
            x: self.x + h * d.x,
            y: self.y + h * d.y,
            z: self.z + h * d.z,
            v: self.v + h * d.v,
            gamma: self.gamma + h * d.gamma,
            chi: self.chi + h * d.chi,
        }
    }

    pub fn horizontal_distance(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlState {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroForces {
    pub lift: f64,
    pub drag: f64,
    pub lateral: f64,
}

/// Time derivative of an [`AircraftState`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StateRate {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v: f64,
    pub gamma: f64,
    pub chi: f64,
}

fn forces(v: f64, ctrl: &ControlState, cfg: &AircraftConfig) -> AeroForces {
    let q = 0.5 * cfg.air_density * v * v * cfg.wing_area;
    let cl = cfg.lift_coefficient(ctrl.alpha);
    AeroForces {
        lift: q * cl,
        drag: q * (cfg.cd0 + cfg.k_induced * cl * cl),
        lateral: q * cfg.cy_beta * ctrl.beta,
    }
}

/// Lift, drag and side force at the current airspeed.
pub fn aero_forces(
    state: &AircraftState,
    ctrl: &ControlState,
    cfg: &AircraftConfig,
) -> Result<AeroForces> {
    if state.v < cfg.v_min {
        return Err(SimError::Stall {
            airspeed: state.v,
            v_min: cfg.v_min,
        });
    }
    Ok(forces(state.v, ctrl, cfg))
}

/// Right-hand side of the six equations of motion.
///
/// The stall guard is enforced by [`integrate_step`], not here, so that
/// intermediate Runge–Kutta stages may dip below `v_min`.
pub fn state_derivative(
    state: &AircraftState,
    ctrl: &ControlState,
    wind: &WindVector,
    cfg: &AircraftConfig,
) -> Result<StateRate> {
    let (sin_g, cos_g) = state.gamma.sin_cos();
    if cos_g < COS_GAMMA_FLOOR {
        return Err(SimError::Singularity { cos_gamma: cos_g });
    }
    let (sin_c, cos_c) = state.chi.sin_cos();
    let (sin_m, cos_m) = ctrl.mu.sin_cos();
    let AeroForces {
        lift,
        drag,
        lateral,
    } = forces(state.v, ctrl, cfg);
    let m = cfg.mass;
    let g = cfg.gravity;
    let v = state.v;
    Ok(StateRate {
        x: v * cos_c * cos_g + wind.w_x,
        y: v * sin_c * cos_g + wind.w_y,
        z: v * sin_g + wind.w_z,
        v: -drag / m - g * sin_g,
        gamma: (lift * cos_m + lateral * sin_m) / (m * v) - g / v * cos_g,
        chi: (lift * sin_m - lateral * cos_m) / (m * v * cos_g),
    })
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    } else if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: AircraftState,
    /// Set when the airspeed had to be clamped at `v_min`.
    pub stall_clamped: bool,
}

/// One classical RK4 step of length `dt` starting at time `t`.
///
/// `wind` is re-queried at each stage position as `wind(x, y, z, t)`.
pub fn integrate_step<W>(
    state: &AircraftState,
    ctrl: &ControlState,
    wind: W,
    t: f64,
    dt: f64,
    cfg: &AircraftConfig,
) -> Result<StepOutcome>
where
    W: Fn(f64, f64, f64, f64) -> WindVector,
{
    if !(dt > 0.0) {
        return Err(SimError::invalid("dt", "integration step must be positive"));
    }
    let rate = |s: &AircraftState, t: f64| state_derivative(s, ctrl, &wind(s.x, s.y, s.z, t), cfg);
    let half = 0.5 * dt;
    let k1 = rate(state, t)?;
    let k2 = rate(&state.offset(&k1, half), t + half)?;
    let k3 = rate(&state.offset(&k2, half), t + half)?;
    let k4 = rate(&state.offset(&k3, dt), t + dt)?;
    let sixth = dt / 6.0;
    let combine = |a: f64, b: f64, c: f64, d: f64| sixth * (a + 2.0 * b + 2.0 * c + d);
    let mut next = AircraftState {
        x: state.x + combine(k1.x, k2.x, k3.x, k4.x),
        y: state.y + combine(k1.y, k2.y, k3.y, k4.y),
        z: state.z + combine(k1.z, k2.z, k3.z, k4.z),
        v: state.v + combine(k1.v, k2.v, k3.v, k4.v),
        gamma: state.gamma + combine(k1.gamma, k2.gamma, k3.gamma, k4.gamma),
        chi: wrap_angle(state.chi + combine(k1.chi, k2.chi, k3.chi, k4.chi)),
    };
    if next.gamma.cos() < COS_GAMMA_FLOOR {
        return Err(SimError::Singularity {
            cos_gamma: next.gamma.cos(),
        });
    }
    let stall_clamped = next.v < cfg.v_min;
    if stall_clamped {
        next.v = cfg.v_min;
    }
    Ok(StepOutcome {
        state: next,
        stall_clamped,
    })
}

/// Specific total energy `z + V² / (2g)`, in meters.
pub fn total_energy(state: &AircraftState, g: f64) -> f64 {
    state.z + state.v * state.v / (2.0 * g)
}

/// Saturates sideslip and bank at their limits; `alpha` is left alone.
pub fn clamp_controls(ctrl: &ControlState, cfg: &AircraftConfig) -> ControlState {
    ControlState {
        alpha: ctrl.alpha,
        beta: ctrl.beta.clamp(-cfg.beta_max, cfg.beta_max),
        mu: ctrl.mu.clamp(-cfg.mu_max, cfg.mu_max),
    }
}
