//! Seeded fixtures shared by the benchmark targets.

use manifest_core::SymMatrix;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn factor(seed: u64, d: usize, rank: usize) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(d, rank, |_, _| rng.random_range(-1.0..1.0))
}

/// `B Bᵀ + I/2` for a random square `B`.
pub fn random_spd(seed: u64, d: usize) -> SymMatrix {
    let b = factor(seed, d, d);
    SymMatrix::new(&b * b.transpose() + DMatrix::identity(d, d) * 0.5).expect("symmetric by construction")
}

/// Rank-`rank` PSD matrix `B Bᵀ`.
pub fn random_psd(seed: u64, d: usize, rank: usize) -> SymMatrix {
    let b = factor(seed, d, rank);
    SymMatrix::new(&b * b.transpose()).expect("symmetric by construction")
}

/// Random dense matrix with entries in `[-1, 1)`.
pub fn random_dense(seed: u64, rows: usize, cols: usize) -> DMatrix<f64> {
    factor(seed, rows, cols)
}
