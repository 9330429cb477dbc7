//! Closed-form pieces of the updraft model: the altitude law, the radial
//! shape, the radii law and the life-cycle coefficient.

use std::f64::consts::PI;

use super::{AtmosphereConfig, ThermalParams};

/// Fraction of `z_i` above which every thermal velocity vanishes.
pub const CEILING_FRACTION: f64 = 0.9;

/// Peak updraft velocity at altitude `z` for a thermal of scale `w_star`
/// and boundary-layer depth `z_i`.
pub fn w_peak(z: f64, w_star: f64, z_i: f64) -> f64 {
    debug_assert!(z_i > 0.0);
    if z <= 0.0 || z >= CEILING_FRACTION * z_i {
        return 0.0;
    }
    let h = z / z_i;
    w_star * h.cbrt() * (1.0 - 1.1 * h)
}

/// Normalized radial distribution of vertical wind around a thermal center.
///
/// Plateau of 1 inside `r1`, cosine roll-off to 0 at `r2`, a sin² downdraft
/// ring of depth `k_down` on `(r2, 2 r2)` and nothing beyond.
///
/// Panics unless `0 < r1 < r2`.
pub fn updraft_shape(r: f64, r1: f64, r2: f64, k_down: f64) -> f64 {
    assert!(
        r1 > 0.0 && r1 < r2,
        "updraft_shape requires 0 < r1 < r2 (got r1 = {r1}, r2 = {r2})"
    );
    if r <= r1 {
        1.0
    } else if r <= r2 {
        0.5 * (1.0 + (PI * (r - r1) / (r2 - r1)).cos())
    } else if r < 2.0 * r2 {
        let s = (PI * (r - r2) / r2).sin();
        -k_down * s * s
    } else {
        0.0
    }
}

/// Area integral of [`updraft_shape`] over the disc `r < 2 r2`, in m².
///
/// With `d = r2 - r1` the three pieces integrate to `π r1²`,
/// `π (d²/2 + r1 d - 2 d²/π²)` and `-3/2 π k_down r2²`.
pub fn shape_area_integral(r1: f64, r2: f64, k_down: f64) -> f64 {
    let d = r2 - r1;
    let core = PI * r1 * r1;
    let rolloff = PI * (0.5 * d * d + r1 * d - 2.0 * d * d / (PI * PI));
    let ring = -1.5 * PI * k_down * r2 * r2;
    core + rolloff + ring
}

/// Inner and outer radii `(r1, r2)` of a thermal at altitude `z`.
pub fn thermal_radii(z: f64, z_i: f64, cfg: &AtmosphereConfig) -> (f64, f64) {
    let h = (z.max(0.0) / z_i).cbrt();
    let r2 = (cfg.r_max * h).max(cfg.r_min);
    (cfg.core_ratio * r2, r2)
}

/// Life-cycle multiplier in `[0, 1]` applied to the thermal's updraft.
///
/// Zero during the latency phase and after death; in between it follows
/// the bump `τ^ξ (1 - τ)` normalized so that its maximum, reached at
/// `τ* = ξ / (ξ + 1)`, is exactly 1.
pub fn life_cycle_coeff(t: f64, th: &ThermalParams) -> f64 {
    let start = th.t_birth + th.t_off;
    if t < start || t >= start + th.t_life {
        return 0.0;
    }
    let tau = (t - start) / th.t_life;
    let tau_star = th.xi / (th.xi + 1.0);
    let bump = |x: f64| x.powf(th.xi) * (1.0 - x);
    (bump(tau) / bump(tau_star)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const W_STAR: f64 = 2.56;
    const Z_I: f64 = 1401.0;

    fn thermal(xi: f64) -> ThermalParams {
        ThermalParams {
            x_th: 0.0,
            y_th: 0.0,
            w_star: W_STAR,
            z_i: Z_I,
            v_drift_x: 0.0,
            v_drift_y: 0.0,
            t_birth: 10.0,
            t_off: 20.0,
            t_life: 300.0,
            xi,
        }
    }

    #[test]
    fn w_peak_vanishes_at_ground_and_ceiling() {
        assert_eq!(w_peak(0.0, W_STAR, Z_I), 0.0);
        assert_eq!(w_peak(-5.0, W_STAR, Z_I), 0.0);
        assert_eq!(w_peak(Z_I * 0.95, W_STAR, Z_I), 0.0);
        assert_eq!(w_peak(Z_I * 0.9, W_STAR, Z_I), 0.0);
    }

    #[test]
    fn w_peak_maximum_by_grid_search() {
        // 10^4-point grid over (0, 0.9 z_i)
        let n = 10_000;
        let (mut best_z, mut best_w) = (0.0, f64::MIN);
        for i in 1..n {
            let z = 0.9 * Z_I * i as f64 / n as f64;
            let w = w_peak(z, W_STAR, Z_I);
            if w > best_w {
                best_w = w;
                best_z = z;
            }
        }
        // d/dh [h^(1/3) (1 - 1.1 h)] = 0  <=>  h = 1/4.4
        assert!((best_z / Z_I - 1.0 / 4.4).abs() < 1e-3);
        assert_relative_eq!(best_w, 1.172, epsilon = 1e-3);
        assert_relative_eq!(
            w_peak(Z_I / 4.4, W_STAR, Z_I) / W_STAR,
            (1.0f64 / 4.4).cbrt() * 0.75,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            w_peak(Z_I / 4.4, W_STAR, Z_I) / W_STAR,
            0.4577,
            epsilon = 1e-4
        );
    }

    #[test]
    fn shape_reference_points() {
        assert_eq!(updraft_shape(0.0, 60.0, 120.0, 0.3), 1.0);
        assert_eq!(updraft_shape(240.0, 60.0, 120.0, 0.3), 0.0);
        assert_relative_eq!(
            updraft_shape(180.0, 60.0, 120.0, 0.3),
            -0.3,
            epsilon = 1e-12
        );
        assert_relative_eq!(updraft_shape(90.0, 60.0, 120.0, 0.3), 0.5, epsilon = 1e-12);
    }

    #[test]
    #[should_panic]
    fn shape_rejects_inverted_radii() {
        updraft_shape(10.0, 120.0, 60.0, 0.3);
    }

    #[test]
    fn shape_is_continuous_at_breakpoints() {
        let (r1, r2, k) = (45.0, 90.0, 0.3);
        for r in [r1, r2, 2.0 * r2] {
            let lo = updraft_shape(r - 1e-9, r1, r2, k);
            let hi = updraft_shape(r + 1e-9, r1, r2, k);
            assert!((lo - hi).abs() < 1e-6, "jump at r = {r}");
        }
    }

    #[test]
    fn area_integral_matches_radial_quadrature() {
        let (r1, r2, k) = (37.0, 81.0, 0.3);
        let n = 200_000;
        let h = 2.0 * r2 / n as f64;
        let numeric: f64 = (0..n)
            .map(|i| {
                let r = (i as f64 + 0.5) * h;
                updraft_shape(r, r1, r2, k) * 2.0 * PI * r * h
            })
            .sum();
        assert_relative_eq!(numeric, shape_area_integral(r1, r2, k), max_relative = 1e-6);
    }

    #[test]
    fn radii_law() {
        let cfg = AtmosphereConfig::default();
        let (r1, r2) = thermal_radii(1e-9, Z_I, &cfg);
        assert_relative_eq!(r2, 10.0);
        assert_relative_eq!(r1, 5.0);
        let (r1, r2) = thermal_radii(Z_I, Z_I, &cfg);
        assert_relative_eq!(r1, 75.0);
        assert_relative_eq!(r2, 150.0);
        let mut prev = 0.0;
        for i in 1..1000 {
            let (_, r2) = thermal_radii(Z_I * i as f64 / 1000.0, Z_I, &cfg);
            assert!(r2 >= prev);
            prev = r2;
        }
    }

    #[test]
    fn life_cycle_latency_and_endpoints() {
        let th = thermal(2.0);
        assert_eq!(life_cycle_coeff(th.t_birth + th.t_off / 2.0, &th), 0.0);
        assert_eq!(life_cycle_coeff(th.t_birth + th.t_off, &th), 0.0);
        assert_eq!(
            life_cycle_coeff(th.t_birth + th.t_off + th.t_life, &th),
            0.0
        );
        assert_eq!(life_cycle_coeff(1e9, &th), 0.0);
    }

    #[test]
    fn life_cycle_peak_by_dense_scan() {
        let th = thermal(2.0);
        let start = th.t_birth + th.t_off;
        let n = 100_000;
        let (mut best_tau, mut best_c) = (0.0, f64::MIN);
        for i in 0..n {
            let tau = i as f64 / n as f64;
            let c = life_cycle_coeff(start + tau * th.t_life, &th);
            assert!((0.0..=1.0).contains(&c));
            if c > best_c {
                best_c = c;
                best_tau = tau;
            }
        }
        assert!((best_tau - 2.0 / 3.0).abs() < 1e-4);
        assert_relative_eq!(best_c, 1.0, epsilon = 1e-8);
        assert_relative_eq!(
            life_cycle_coeff(start + 2.0 / 3.0 * th.t_life, &th),
            1.0,
            epsilon = 1e-12
        );
    }
}
