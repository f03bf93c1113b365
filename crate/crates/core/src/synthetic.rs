//! Seeded synthetic data for smoke tests and trend checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::types::Dataset;

/// Two unit-variance Gaussian classes whose means sit at `±separation/2`
/// along the normalised all-ones direction. Labels alternate 0, 1, 0, ...
pub fn two_gaussians(n: usize, d: usize, separation: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = separation / 2.0 / (d as f64).sqrt();
    let mut features = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 2) as i64;
        let sign = if label == 0 { -1.0 } else { 1.0 };
        for _ in 0..d {
            let z: f64 = StandardNormal.sample(&mut rng);
            features.push(sign * offset + z);
        }
        labels.push(label);
    }
    Dataset::new(features, n, d, labels, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_separated() {
        let a = two_gaussians(200, 4, 3.0, 7).unwrap();
        assert_eq!(a, two_gaussians(200, 4, 3.0, 7).unwrap());
        assert_ne!(a, two_gaussians(200, 4, 3.0, 8).unwrap());
        // Projection on the all-ones direction separates the class means by ~3.
        let proj = |i: usize| a.row(i).iter().sum::<f64>() / 2.0;
        let mean = |c: usize| {
            let idx: Vec<usize> = (0..a.len()).filter(|&i| a.labels()[i] == c).collect();
            idx.iter().map(|&i| proj(i)).sum::<f64>() / idx.len() as f64
        };
        assert!((mean(1) - mean(0) - 3.0).abs() < 0.5);
    }
}
