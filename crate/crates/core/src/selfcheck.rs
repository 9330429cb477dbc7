//! Numerical self-checks run by the `validate` command.

use crate::atmosphere::{w_peak, AtmosphereConfig, AtmosphereField, ThermalParams, WindVector};
use crate::dynamics::{integrate_step, total_energy, AircraftConfig, AircraftState, ControlState};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            measured,
            expected,
            tolerance,
            passed: (measured - expected).abs() <= tolerance,
        }
    }
}

/// Net vertical flux through the arena disc at altitude `z` relative to
/// the positive (updraft) flux, by midpoint quadrature on a square grid of
/// spacing `h`.
pub fn relative_net_flux(field: &AtmosphereField, z: f64, t: f64, h: f64) -> (f64, f64) {
    let radius = field.config.arena_radius;
    let n = (2.0 * radius / h).ceil() as i64;
    let (mut net, mut positive) = (0.0, 0.0);
    for i in 0..n {
        let x = -radius + (i as f64 + 0.5) * h;
        for j in 0..n {
            let y = -radius + (j as f64 + 0.5) * h;
            if x.hypot(y) >= radius {
                continue;
            }
            let w = field.wind_at(x, y, z, t).w_z;
            net += w;
            positive += w.max(0.0);
        }
    }
    (net * h * h, positive * h * h)
}

/// A single mature thermal at the arena center with `w* = 2.56`,
/// `z_i = 1401`, no drift and no noise.
pub fn single_thermal_field() -> Result<AtmosphereField> {
    let cfg = AtmosphereConfig {
        noise_sigma: 0.0,
        ..AtmosphereConfig::default()
    };
    let th = ThermalParams {
        x_th: 0.0,
        y_th: 0.0,
        w_star: 2.56,
        z_i: 1401.0,
        v_drift_x: 0.0,
        v_drift_y: 0.0,
        t_birth: 0.0,
        t_off: 0.0,
        t_life: 400.0,
        xi: 1.0,
    };
    AtmosphereField::scripted(cfg, vec![th], 0, false)
}

pub fn mass_conservation_checks() -> Result<Vec<CheckOutcome>> {
    let field = single_thermal_field()?;
    let z_i = field.thermals[0].z_i;
    Ok([0.2, 0.4, 0.6]
        .into_iter()
        .map(|frac| {
            let (net, positive) = relative_net_flux(&field, frac * z_i, 200.0, 1.0);
            CheckOutcome::new(
                format!("mass conservation at z = {frac} z_i (net / positive flux)"),
                net / positive,
                0.0,
                0.01,
            )
        })
        .collect())
}

pub fn altitude_law_check() -> CheckOutcome {
    let n = 100_000;
    let best = (1..n)
        .map(|i| i as f64 / n as f64)
        .max_by(|a, b| w_peak(*a, 1.0, 1.0).total_cmp(&w_peak(*b, 1.0, 1.0)))
        .unwrap_or(0.0);
    CheckOutcome::new("updraft profile argmax z / z_i", best, 1.0 / 4.4, 1e-3)
}

/// Simulates a wings-level glide in calm air from a perturbed start and
/// compares the settled airspeed and climb angle with the algebraic
/// equilibrium.
pub fn steady_glide_checks(aircraft: &AircraftConfig) -> Result<Vec<CheckOutcome>> {
    let ctrl = ControlState {
        alpha: aircraft.trim_alpha(),
        beta: 0.0,
        mu: 0.0,
    };
    let (v_eq, gamma_eq) = aircraft.steady_glide(ctrl.alpha);
    let mut s = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 5000.0,
        v: 1.1 * v_eq,
        gamma: 0.0,
        chi: 0.0,
    };
    let dt = 0.01;
    for k in 0..40_000 {
        s = integrate_step(
            &s,
            &ctrl,
            |_, _, _, _| WindVector::default(),
            k as f64 * dt,
            dt,
            aircraft,
        )?
        .state;
    }
    Ok(vec![
        CheckOutcome::new(
            "steady glide airspeed (relative error)",
            s.v / v_eq - 1.0,
            0.0,
            0.02,
        ),
        CheckOutcome::new(
            "steady glide climb angle (relative error)",
            s.gamma / gamma_eq - 1.0,
            0.0,
            0.02,
        ),
    ])
}

/// Energy audit in calm air: finite-differenced specific energy against
/// the drag power `-D V / (m g)`.
pub fn energy_audit_check(aircraft: &AircraftConfig) -> Result<CheckOutcome> {
    let ctrl = ControlState {
        alpha: aircraft.trim_alpha(),
        beta: 0.02,
        mu: 0.2,
    };
    let mut s = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 1000.0,
        v: 16.0,
        gamma: 0.0,
        chi: 0.0,
    };
    let dt = 0.001;
    let g = aircraft.gravity;
    let mut worst: f64 = 0.0;
    for k in 0..20_000 {
        let next = integrate_step(
            &s,
            &ctrl,
            |_, _, _, _| WindVector::default(),
            k as f64 * dt,
            dt,
            aircraft,
        )?
        .state;
        let de = (total_energy(&next, g) - total_energy(&s, g)) / dt;
        let drag_power = |st: &AircraftState| {
            let q = 0.5 * aircraft.air_density * st.v * st.v * aircraft.wing_area;
            -q * aircraft.drag_coefficient(ctrl.alpha) * st.v / (aircraft.mass * g)
        };
        let expected = 0.5 * (drag_power(&s) + drag_power(&next));
        worst = worst.max(((de - expected) / expected).abs());
        s = next;
    }
    Ok(CheckOutcome::new(
        "energy rate vs drag power (max relative error)",
        worst,
        0.0,
        1e-4,
    ))
}

/// Every self-check with the default aircraft.
pub fn run_all(aircraft: &AircraftConfig) -> Result<Vec<CheckOutcome>> {
    let mut out = mass_conservation_checks()?;
    out.push(altitude_law_check());
    out.extend(steady_glide_checks(aircraft)?);
    out.push(energy_audit_check(aircraft)?);
    Ok(out)
}
