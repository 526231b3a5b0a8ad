//! Deterministic inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hourly counts with a low base rate and a few spikes.
pub fn spiky_series(hours: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..hours)
        .map(|_| {
            if rng.random_bool(0.005) {
                rng.random_range(50..500)
            } else {
                rng.random_range(0..6)
            }
        })
        .collect()
}

/// Log-uniform capitalizations between 1e6 and 1e12.
pub fn caps(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| 10f64.powf(rng.random_range(6.0..12.0)))
        .collect()
}

/// Class labels drawn from `classes` symbols, `x` per vector.
pub fn label_vectors(count: usize, x: usize, classes: u8, seed: u64) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..x).map(|_| rng.random_range(0..classes)).collect())
        .collect()
}

/// Values in `[0, 1]` with heavy ties, like per-tweet entropies.
pub fn tied_unit_sample(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| f64::from(rng.random_range(0u8..=20)) / 20.0)
        .collect()
}
