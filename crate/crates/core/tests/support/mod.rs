#![allow(dead_code)]

use drovar_core::{EmpiricalMeasure, FDivergenceFamily, ProblemData};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Interior baseline weights, each at least roughly `0.05 / n`.
pub fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> EmpiricalMeasure {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = w[..n - 1].iter().sum();
    w[n - 1] = 1.0 - head;
    EmpiricalMeasure::new(w).unwrap()
}

pub fn random_data(rng: &mut ChaCha8Rng, n: usize) -> ProblemData {
    let rho = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let phi = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    ProblemData::new(rho, phi).unwrap()
}

pub fn families() -> [FDivergenceFamily; 3] {
    [
        FDivergenceFamily::kl(),
        FDivergenceFamily::alpha(2.0).unwrap(),
        FDivergenceFamily::alpha(0.5).unwrap(),
    ]
}

/// A random point of the simplex (normalized exponentials).
pub fn random_simplex_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-12f64..1.0).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}
