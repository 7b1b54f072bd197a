//! Mantegna's generator for Lévy-stable step lengths.

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

pub const DEFAULT_BETA: f64 = 1.5;
pub const DEFAULT_SCALE: f64 = 0.01;

/// Scale of the numerator Gaussian in Mantegna's algorithm.
pub fn mantegna_sigma(beta: f64) -> f64 {
    let num = gamma(1.0 + beta) * (PI * beta / 2.0).sin();
    let den = gamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0);
    (num / den).powf(1.0 / beta)
}

#[derive(Debug, Clone, Copy)]
pub struct LevyFlight {
    beta: f64,
    scale: f64,
    sigma: f64,
}

impl LevyFlight {
    pub fn new(beta: f64, scale: f64) -> Self {
        assert!(beta > 0.0 && beta <= 2.0, "levy beta must lie in (0, 2], got {beta}");
        Self {
            beta,
            scale,
            sigma: mantegna_sigma(beta),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(StandardNormal);
        let v: f64 = rng.sample(StandardNormal);
        self.scale * u * self.sigma / v.abs().powf(1.0 / self.beta)
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Vec<f64> {
        (0..dim).map(|_| self.sample(rng)).collect()
    }
}

impl Default for LevyFlight {
    fn default() -> Self {
        Self::new(DEFAULT_BETA, DEFAULT_SCALE)
    }
}

/// One Lévy step vector of length `dim`.
pub fn levy_flight<R: Rng + ?Sized>(dim: usize, beta: f64, scale: f64, rng: &mut R) -> Vec<f64> {
    LevyFlight::new(beta, scale).sample_vec(dim, rng)
}
