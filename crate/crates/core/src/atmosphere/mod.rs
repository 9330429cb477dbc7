//! Convective atmosphere: a constant population of drifting, finite-life
//! thermals over a circular arena, an environmental sink that balances
//! their mass flux, and correlated wind noise.

mod noise;
mod profile;

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::rng::{self, SimRng, Stream};

pub use noise::OuNoise;
pub use profile::{
    life_cycle_coeff, shape_area_integral, thermal_radii, updraft_shape, w_peak, CEILING_FRACTION,
};

/// Closed interval `[min, max]` sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub min: f64,
    pub max: f64,
}

impl Span {
    pub const fn new(min: f64, max: f64) -> Self {
        Span { min, max }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.max > self.min {
            rng.random_range(self.min..=self.max)
        } else {
            self.min
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereConfig {
    /// Number of thermals kept alive in the arena.
    pub n_thermals: usize,
    pub arena_radius: f64,
    pub w_star: Span,
    pub z_i: Span,
    /// Range for each horizontal drift component.
    pub drift: Span,
    pub t_off: Span,
    pub t_life: Span,
    pub xi: Span,
    pub r_min: f64,
    pub r_max: f64,
    /// `r1 / r2`.
    pub core_ratio: f64,
    /// Depth of the downdraft ring, as a fraction of the peak updraft.
    pub k_down: f64,
    pub noise_sigma: f64,
    pub noise_tau: f64,
}

impl Default for AtmosphereConfig {
    fn default() -> Self {
        AtmosphereConfig {
            n_thermals: 3,
            arena_radius: 550.0,
            w_star: Span::new(1.5, 3.5),
            z_i: Span::new(1100.0, 1700.0),
            drift: Span::new(-1.4, 1.4),
            t_off: Span::new(0.0, 60.0),
            t_life: Span::new(120.0, 600.0),
            xi: Span::new(1.0, 4.0),
            r_min: 10.0,
            r_max: 150.0,
            core_ratio: 0.5,
            k_down: 0.3,
            noise_sigma: 0.3,
            noise_tau: 1.0,
        }
    }
}

impl AtmosphereConfig {
    pub fn validate(&self) -> Result<()> {
        let positive_span = |name: &'static str, s: &Span| {
            if !(s.min > 0.0 && s.max >= s.min) {
                return Err(SimError::invalid(name, "range must satisfy 0 < min <= max"));
            }
            Ok(())
        };
        positive_span("w_star", &self.w_star)?;
        positive_span("z_i", &self.z_i)?;
        positive_span("t_life", &self.t_life)?;
        positive_span("xi", &self.xi)?;
        if !(self.t_off.min >= 0.0 && self.t_off.max >= self.t_off.min) {
            return Err(SimError::invalid(
                "t_off",
                "range must satisfy 0 <= min <= max",
            ));
        }
        if !(self.drift.max >= self.drift.min) || !self.drift.min.is_finite() {
            return Err(SimError::invalid("drift", "range must satisfy min <= max"));
        }
        if !(self.arena_radius > 0.0) {
            return Err(SimError::invalid("arena_radius", "must be positive"));
        }
        if !(self.r_min > 0.0 && self.r_max >= self.r_min) {
            return Err(SimError::invalid(
                "r_max",
                "radii must satisfy 0 < r_min <= r_max",
            ));
        }
        if !(self.core_ratio > 0.0 && self.core_ratio < 1.0) {
            return Err(SimError::invalid("core_ratio", "must lie in (0, 1)"));
        }
        if !(self.k_down >= 0.0) {
            return Err(SimError::invalid("k_down", "must be non-negative"));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(SimError::invalid("noise_sigma", "must be non-negative"));
        }
        if !(self.noise_tau > 0.0) {
            return Err(SimError::invalid("noise_tau", "must be positive"));
        }
        Ok(())
    }

    pub fn arena_area(&self) -> f64 {
        PI * self.arena_radius * self.arena_radius
    }
}

/// One thermal. Times are absolute simulation seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub x_th: f64,
    pub y_th: f64,
    pub w_star: f64,
    pub z_i: f64,
    pub v_drift_x: f64,
    pub v_drift_y: f64,
    pub t_birth: f64,
    pub t_off: f64,
    pub t_life: f64,
    pub xi: f64,
}

impl ThermalParams {
    pub fn death_time(&self) -> f64 {
        self.t_birth + self.t_off + self.t_life
    }

    pub fn is_dead(&self, t: f64) -> bool {
        t >= self.death_time()
    }

    /// True while the life-cycle window is open (latency over, not yet dead).
    pub fn is_active(&self, t: f64) -> bool {
        t >= self.t_birth + self.t_off && t < self.death_time()
    }

    pub fn center(&self, t: f64) -> (f64, f64) {
        let age = t - self.t_birth;
        (
            self.x_th + self.v_drift_x * age,
            self.y_th + self.v_drift_y * age,
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WindVector {
    pub w_x: f64,
    pub w_y: f64,
    pub w_z: f64,
}

/// Draws a fresh thermal born at `t`, centered uniformly in the arena disc.
pub fn spawn_thermal<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &AtmosphereConfig,
    t: f64,
) -> ThermalParams {
    // sqrt of a uniform radius fraction gives a uniform areal density
    let radius = cfg.arena_radius * rng.random::<f64>().sqrt();
    let angle = 2.0 * PI * rng.random::<f64>();
    ThermalParams {
        x_th: radius * angle.cos(),
        y_th: radius * angle.sin(),
        w_star: cfg.w_star.sample(rng),
        z_i: cfg.z_i.sample(rng),
        v_drift_x: cfg.drift.sample(rng),
        v_drift_y: cfg.drift.sample(rng),
        t_birth: t,
        t_off: cfg.t_off.sample(rng),
        t_life: cfg.t_life.sample(rng),
        xi: cfg.xi.sample(rng),
    }
}

/// The live atmosphere. Mutated only through [`AtmosphereField::step`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereField {
    pub config: AtmosphereConfig,
    pub thermals: Vec<ThermalParams>,
    pub noise: OuNoise,
    /// When false, dead thermals stay in the list as inert entries instead
    /// of being replaced. Scripted scenarios use this.
    pub respawn: bool,
    spawn_rng: SimRng,
    noise_rng: SimRng,
}

impl AtmosphereField {
    /// Builds a field with `config.n_thermals` randomly spawned thermals at
    /// time `t0`, using the spawn and noise streams of `seed`.
    pub fn new(config: AtmosphereConfig, seed: u64, t0: f64) -> Result<Self> {
        config.validate()?;
        let mut spawn_rng = rng::stream(seed, Stream::Spawn);
        let mut noise_rng = rng::stream(seed, Stream::Noise);
        let thermals = (0..config.n_thermals)
            .map(|_| spawn_thermal(&mut spawn_rng, &config, t0))
            .collect();
        let noise = OuNoise::stationary(config.noise_sigma, config.noise_tau, &mut noise_rng);
        Ok(AtmosphereField {
            config,
            thermals,
            noise,
            respawn: true,
            spawn_rng,
            noise_rng,
        })
    }

    /// Builds a field around a scripted thermal list. The population size is
    /// the length of `thermals`.
    pub fn scripted(
        mut config: AtmosphereConfig,
        thermals: Vec<ThermalParams>,
        seed: u64,
        respawn: bool,
    ) -> Result<Self> {
        config.n_thermals = thermals.len();
        let mut field = AtmosphereField::new(config, seed, 0.0)?;
        field.thermals = thermals;
        field.respawn = respawn;
        Ok(field)
    }

    pub fn from_json(json: &str) -> serde_json::Result<Self> {
        serde_json::from_str(json)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// Advances the noise by `dt` and replaces every thermal dead at
    /// `t + dt`.
    pub fn step(&mut self, t: f64, dt: f64) {
        debug_assert!(dt > 0.0);
        self.noise.step(dt, &mut self.noise_rng);
        if !self.respawn {
            return;
        }
        let now = t + dt;
        for i in 0..self.thermals.len() {
            if self.thermals[i].is_dead(now) {
                self.thermals[i] = spawn_thermal(&mut self.spawn_rng, &self.config, now);
            }
        }
    }

    /// Ends thermal `index`'s life at time `t`.
    pub fn expire_thermal(&mut self, index: usize, t: f64) {
        let th = &mut self.thermals[index];
        let start = th.t_birth + th.t_off;
        if t <= start {
            th.t_off = (t - th.t_birth).max(0.0);
            th.t_life = f64::MIN_POSITIVE;
        } else {
            th.t_life = t - start;
        }
    }

    /// Total mass flux (m³/s) carried by live thermals through altitude `z`,
    /// and the area (m²) of their footprints.
    fn flux_budget(&self, z: f64, t: f64) -> (f64, f64) {
        let mut flux = 0.0;
        let mut area = 0.0;
        for th in self.thermals.iter().filter(|th| th.is_active(t)) {
            let (r1, r2) = thermal_radii(z, th.z_i, &self.config);
            let strength = life_cycle_coeff(t, th) * w_peak(z, th.w_star, th.z_i);
            flux += strength * shape_area_integral(r1, r2, self.config.k_down);
            area += PI * 4.0 * r2 * r2;
        }
        (flux, area)
    }

    /// Uniform sink applied outside every live thermal footprint so that the
    /// net vertical flux through the arena at altitude `z` vanishes.
    pub fn environmental_sink(&self, z: f64, t: f64) -> f64 {
        let (flux, footprint) = self.flux_budget(z, t);
        let free = self.config.arena_area() - footprint;
        if flux == 0.0 || free <= 0.0 {
            return 0.0;
        }
        -flux / free
    }

    /// Wind at earth-frame position `(x, y, z)` and time `t`.
    pub fn wind_at(&self, x: f64, y: f64, z: f64, t: f64) -> WindVector {
        let mut w_z = 0.0;
        let mut inside = false;
        for th in self.thermals.iter().filter(|th| th.is_active(t)) {
            let (r1, r2) = thermal_radii(z, th.z_i, &self.config);
            let (cx, cy) = th.center(t);
            let r = (x - cx).hypot(y - cy);
            if r < 2.0 * r2 {
                inside = true;
                let strength = life_cycle_coeff(t, th) * w_peak(z, th.w_star, th.z_i);
                w_z += strength * updraft_shape(r, r1, r2, self.config.k_down);
            }
        }
        if !inside {
            w_z += self.environmental_sink(z, t);
        }
        let [n_x, n_y, n_z] = self.noise.value;
        WindVector {
            w_x: n_x,
            w_y: n_y,
            w_z: w_z + n_z,
        }
    }

    /// Index of the first active thermal whose footprint contains `(x, y)`
    /// at altitude `z`.
    pub fn thermal_containing(
        &self,
        x: f64,
        y: f64,
        z: f64,
        t: f64,
        core_only: bool,
    ) -> Option<usize> {
        self.thermals.iter().position(|th| {
            if !th.is_active(t) {
                return false;
            }
            let (_, r2) = thermal_radii(z, th.z_i, &self.config);
            let (cx, cy) = th.center(t);
            let r = (x - cx).hypot(y - cy);
            r < if core_only { r2 } else { 2.0 * r2 }
        })
    }
}
