#![allow(dead_code)]

use dpreg::{DMatrix, DVector, DenseOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_operator(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseOperator {
    DenseOperator::new(DMatrix::from_fn(rows, cols, |_, _| {
        rng.sample(StandardNormal)
    }))
    .unwrap()
}

/// Random operator scaled to `|F| = 1`.
pub fn unit_operator(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseOperator {
    let op = gaussian_operator(rng, rows, cols);
    let s = op.norm().unwrap();
    op.scaled(1.0 / s).unwrap()
}

pub fn random_dims(rng: &mut ChaCha8Rng, max: usize) -> (usize, usize) {
    (rng.random_range(1..=max), rng.random_range(1..=max))
}

pub fn rel_err(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
