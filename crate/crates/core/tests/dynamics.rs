use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use soarsim::atmosphere::WindVector;
use soarsim::dynamics::*;

fn calm(_: f64, _: f64, _: f64, _: f64) -> WindVector {
    WindVector::default()
}

fn fly(
    mut s: AircraftState,
    ctrl: &ControlState,
    cfg: &AircraftConfig,
    dt: f64,
    duration: f64,
) -> AircraftState {
    let n = (duration / dt).round() as u64;
    for k in 0..n {
        s = integrate_step(&s, ctrl, calm, k as f64 * dt, dt, cfg)
            .unwrap()
            .state;
    }
    s
}

fn forceless() -> AircraftConfig {
    AircraftConfig {
        cl_alpha: 0.0,
        cd0: 0.0,
        k_induced: 0.0,
        cy_beta: 0.0,
        ..AircraftConfig::default()
    }
}

#[test]
fn vacuum_flight_matches_projectile_motion() {
    let cfg = forceless();
    let g = cfg.gravity;
    let start = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 100.0,
        v: 15.0,
        gamma: 0.4,
        chi: 0.7,
    };
    let ctrl = ControlState::default();
    let end = fly(start, &ctrl, &cfg, 1e-3, 1.0);

    let t = 1.0;
    let u = start.v * start.gamma.cos();
    let w = start.v * start.gamma.sin() - g * t;
    let expected = AircraftState {
        x: u * t * start.chi.cos(),
        y: u * t * start.chi.sin(),
        z: start.z + start.v * start.gamma.sin() * t - 0.5 * g * t * t,
        v: u.hypot(w),
        gamma: w.atan2(u),
        chi: start.chi,
    };
    for (got, want) in [
        (end.x, expected.x),
        (end.y, expected.y),
        (end.z, expected.z),
        (end.v, expected.v),
        (end.gamma, expected.gamma),
        (end.chi, expected.chi),
    ] {
        assert_relative_eq!(got, want, max_relative = 1e-6);
    }
}

#[test]
fn rk4_error_shrinks_sixteenfold_when_dt_halves() {
    let cfg = AircraftConfig::default();
    let ctrl = ControlState {
        alpha: cfg.trim_alpha(),
        beta: 0.1,
        mu: 0.3,
    };
    let start = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 500.0,
        v: 17.0,
        gamma: 0.05,
        chi: 0.0,
    };
    let reference = fly(start, &ctrl, &cfg, 0.1 / 64.0, 10.0);
    let error = |dt: f64| {
        let s = fly(start, &ctrl, &cfg, dt, 10.0);
        ((s.x - reference.x).powi(2) + (s.y - reference.y).powi(2) + (s.z - reference.z).powi(2))
            .sqrt()
    };
    let ratio = error(0.2) / error(0.1);
    assert!((12.0..20.0).contains(&ratio), "error ratio {ratio}");
}

#[test]
fn steady_glide_matches_algebraic_equilibrium() {
    let cfg = AircraftConfig::default();
    let alpha = cfg.trim_alpha();
    let cl = cfg.cl_alpha * (alpha - cfg.alpha0);
    let cd = cfg.cd0 + cfg.k_induced * cl * cl;
    let gamma_eq = -(cd / cl).atan();
    let v_eq = (2.0 * cfg.mass * cfg.gravity * gamma_eq.cos()
        / (cfg.air_density * cfg.wing_area * cl))
        .sqrt();

    let start = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 5000.0,
        v: 0.9 * v_eq,
        gamma: 0.0,
        chi: 0.0,
    };
    let ctrl = ControlState {
        alpha,
        beta: 0.0,
        mu: 0.0,
    };
    let end = fly(start, &ctrl, &cfg, 0.01, 400.0);
    assert_relative_eq!(end.v, v_eq, max_relative = 0.02);
    assert_relative_eq!(end.gamma, gamma_eq, max_relative = 0.02);
    assert_relative_eq!(end.gamma.tan(), -cd / cl, max_relative = 0.02);
}

#[test]
fn energy_rate_equals_drag_power_in_calm_air() {
    let cfg = AircraftConfig::default();
    let ctrl = ControlState {
        alpha: cfg.trim_alpha(),
        beta: -0.2,
        mu: -0.3,
    };
    let mut s = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 800.0,
        v: 14.0,
        gamma: -0.02,
        chi: 1.0,
    };
    let dt = 1e-3;
    let g = cfg.gravity;
    for k in 0..5000 {
        let next = integrate_step(&s, &ctrl, calm, k as f64 * dt, dt, &cfg)
            .unwrap()
            .state;
        let measured = (total_energy(&next, g) - total_energy(&s, g)) / dt;
        let power = |st: &AircraftState| {
            let drag = aero_forces(st, &ctrl, &cfg).unwrap().drag;
            -drag * st.v / (cfg.mass * g)
        };
        let expected = 0.5 * (power(&s) + power(&next));
        assert_relative_eq!(measured, expected, max_relative = 1e-4);
        s = next;
    }
}

#[test]
fn wind_is_re_queried_at_every_stage() {
    let cfg = AircraftConfig::default();
    let ctrl = ControlState {
        alpha: cfg.trim_alpha(),
        ..ControlState::default()
    };
    let start = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 300.0,
        v: 15.0,
        gamma: 0.0,
        chi: 0.0,
    };
    // Updraft growing linearly in time: the RK4 average over [0, dt] is
    // the midpoint value, which a single start-of-step query would miss.
    let ramp = |_: f64, _: f64, _: f64, t: f64| WindVector {
        w_x: 0.0,
        w_y: 0.0,
        w_z: 100.0 * t,
    };
    let dt = 0.01;
    let with_ramp = integrate_step(&start, &ctrl, ramp, 0.0, dt, &cfg)
        .unwrap()
        .state;
    let without = integrate_step(&start, &ctrl, calm, 0.0, dt, &cfg)
        .unwrap()
        .state;
    assert_relative_eq!(
        with_ramp.z - without.z,
        0.5 * 100.0 * dt * dt,
        max_relative = 1e-9
    );
}

#[test]
fn low_airspeed_is_clamped_and_flagged() {
    let cfg = AircraftConfig::default();
    let ctrl = ControlState {
        alpha: cfg.trim_alpha(),
        ..ControlState::default()
    };
    let s = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 300.0,
        v: cfg.v_min + 1e-6,
        gamma: 0.6,
        chi: 0.0,
    };
    let out = integrate_step(&s, &ctrl, calm, 0.0, 0.01, &cfg).unwrap();
    assert!(out.stall_clamped);
    assert_eq!(out.state.v, cfg.v_min);
    assert!(matches!(
        aero_forces(&AircraftState { v: 5.0, ..s }, &ctrl, &cfg),
        Err(soarsim::SimError::Stall { .. })
    ));
}

#[test]
fn vertical_flight_is_a_singularity() {
    let cfg = AircraftConfig::default();
    let s = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 300.0,
        v: 15.0,
        gamma: PI / 2.0,
        chi: 0.0,
    };
    let err =
        state_derivative(&s, &ControlState::default(), &WindVector::default(), &cfg).unwrap_err();
    assert!(matches!(err, soarsim::SimError::Singularity { .. }));
}

#[test]
fn zero_time_step_is_rejected() {
    let cfg = AircraftConfig::default();
    let s = AircraftState {
        x: 0.0,
        y: 0.0,
        z: 300.0,
        v: 15.0,
        gamma: 0.0,
        chi: 0.0,
    };
    assert!(integrate_step(&s, &ControlState::default(), calm, 0.0, 0.0, &cfg).is_err());
}

proptest! {
    #[test]
    fn clamp_is_idempotent_and_bounded(alpha in -1.0..1.0f64, beta in -3.0..3.0f64, mu in -3.0..3.0f64) {
        let cfg = AircraftConfig::default();
        let ctrl = ControlState { alpha, beta, mu };
        let once = clamp_controls(&ctrl, &cfg);
        prop_assert_eq!(clamp_controls(&once, &cfg), once);
        prop_assert!(once.beta.abs() <= cfg.beta_max);
        prop_assert!(once.mu.abs() <= cfg.mu_max);
        prop_assert_eq!(once.alpha, alpha);
    }

    #[test]
    fn course_stays_wrapped(chi in -PI..PI, mu in -0.43..0.43f64, beta in -0.78..0.78f64) {
        let cfg = AircraftConfig::default();
        let ctrl = ControlState { alpha: cfg.trim_alpha(), beta, mu };
        let mut s = AircraftState { x: 0.0, y: 0.0, z: 300.0, v: 15.0, gamma: 0.0, chi };
        for k in 0..2000 {
            s = integrate_step(&s, &ctrl, calm, k as f64 * 0.01, 0.01, &cfg).unwrap().state;
            prop_assert!(s.chi.abs() <= PI);
        }
    }

    #[test]
    fn wrap_angle_is_a_2pi_congruence(a in -100.0..100.0f64) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        let turns = (a - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn energy_ignores_heading(z in 0.0..2000.0f64, v in 8.0..40.0f64, chi in -PI..PI) {
        let a = AircraftState { x: 0.0, y: 0.0, z, v, gamma: 0.0, chi };
        let b = AircraftState { chi: 0.0, ..a };
        prop_assert_eq!(total_energy(&a, 9.81), total_energy(&b, 9.81));
    }
}
