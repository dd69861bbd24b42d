//! Seeded random configurations shared by the suite and the experiments.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use toeplitz_core::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rejection sampler for separated point masses in a closed disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PointSampler {
    pub radius: f64,
    pub min_separation: f64,
    /// Coefficient moduli are uniform in `[coeff_min, coeff_max]` with uniform phase.
    pub coeff_min: f64,
    pub coeff_max: f64,
}

impl Default for PointSampler {
    fn default() -> Self {
        Self {
            radius: 0.8,
            min_separation: 0.15,
            coeff_min: 0.5,
            coeff_max: 2.0,
        }
    }
}

impl PointSampler {
    pub fn point(&self, rng: &mut impl Rng) -> C64 {
        // area-uniform
        let r = self.radius * rng.random::<f64>().sqrt();
        C64::from_polar(r, TAU * rng.random::<f64>())
    }

    pub fn coefficient(&self, rng: &mut impl Rng) -> C64 {
        C64::from_polar(
            rng.random_range(self.coeff_min..=self.coeff_max),
            TAU * rng.random::<f64>(),
        )
    }

    /// `count` points pairwise at least `min_separation` apart, with coefficients.
    pub fn sample(&self, rng: &mut impl Rng, count: usize) -> Vec<(C64, C64)> {
        let mut pts: Vec<C64> = Vec::with_capacity(count);
        while pts.len() < count {
            let z = self.point(rng);
            if pts.iter().all(|p| (p - z).norm() >= self.min_separation) {
                pts.push(z);
            }
        }
        pts.into_iter()
            .map(|z| (z, self.coefficient(rng)))
            .collect()
    }
}

/// Uniform direction on `S²`.
pub fn unit_vector3(rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Unit quaternion drawn uniformly.
pub fn random_quaternion(rng: &mut impl Rng) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            return q;
        }
    }
}
