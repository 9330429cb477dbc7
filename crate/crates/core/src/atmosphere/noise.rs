use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Three independent Ornstein–Uhlenbeck processes, one per wind component.
///
/// Advanced with the exact discretization, so the stationary standard
/// deviation is `sigma` for any step size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuNoise {
    pub sigma: f64,
    pub tau: f64,
    pub value: [f64; 3],
}

impl OuNoise {
    /// Starts the process from its stationary distribution.
    pub fn stationary<R: Rng + ?Sized>(sigma: f64, tau: f64, rng: &mut R) -> Self {
        let mut value = [0.0; 3];
        if sigma > 0.0 {
            for v in &mut value {
                *v = sigma * rng.sample::<f64, _>(StandardNormal);
            }
        }
        OuNoise { sigma, tau, value }
    }

    pub fn step<R: Rng + ?Sized>(&mut self, dt: f64, rng: &mut R) {
        if self.sigma == 0.0 {
            return;
        }
        let decay = (-dt / self.tau).exp();
        let spread = self.sigma * (1.0 - decay * decay).sqrt();
        for v in &mut self.value {
            *v = *v * decay + spread * rng.sample::<f64, _>(StandardNormal);
        }
    }
}
