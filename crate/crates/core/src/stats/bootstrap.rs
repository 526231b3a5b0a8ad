//! Capitalization-spread bootstrap: the expected standard deviation of the
//! capitalizations of `x` companies drawn at random from the catalog.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::describe::population_std;
use crate::error::StatsError;

pub const DEFAULT_BOOTSTRAP_SAMPLES: usize = 10_000;

/// Group sizes covered by the default bootstrap curve.
pub const DEFAULT_GROUP_SIZES: std::ops::RangeInclusive<usize> = 2..=22;

/// Generator used for every draw. Sample `i` of group size `x` reads stream
/// `(x << 40) | i` of a ChaCha8 generator keyed by the seed.
pub const BOOTSTRAP_RNG: &str = "ChaCha8Rng/seed_from_u64/stream=(x<<40)|sample";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub x: usize,
    pub samples: usize,
    pub seed: u64,
    pub rng: String,
    pub mean_std: f64,
    /// Standard error of `mean_std` across samples.
    pub std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sample_stds: Option<Vec<f64>>,
}

/// Population standard deviation of a group's capitalizations.
pub fn cap_std(caps: &[f64]) -> Result<f64, StatsError> {
    population_std(caps).ok_or(StatsError::EmptyList)
}

/// Mean of `cap_std` over `samples` groups of `x` distinct companies drawn
/// uniformly without replacement.
pub fn bootstrap_cap_std(
    caps: &[f64],
    x: usize,
    samples: usize,
    seed: u64,
    keep_samples: bool,
) -> Result<BootstrapResult, StatsError> {
    if x < 2 || x > caps.len() {
        return Err(StatsError::GroupTooLarge {
            x,
            population: caps.len(),
        });
    }
    if samples == 0 {
        return Err(StatsError::TooFewSamples { needed: 1, got: 0 });
    }
    let stds: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((x as u64) << 40) | i as u64);
            // Index order fixed so a subset always yields the same bits.
            let mut picks = rand::seq::index::sample(&mut rng, caps.len(), x).into_vec();
            picks.sort_unstable();
            let group: Vec<f64> = picks.into_iter().map(|j| caps[j]).collect();
            population_std(&group).expect("group is non-empty")
        })
        .collect();

    let n = stds.len() as f64;
    let mean_std = if stds.iter().all(|&s| s == stds[0]) {
        stds[0]
    } else {
        stds.iter().sum::<f64>() / n
    };
    let var = if stds.len() > 1 {
        stds.iter().map(|s| (s - mean_std).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(BootstrapResult {
        x,
        samples,
        seed,
        rng: BOOTSTRAP_RNG.to_string(),
        mean_std,
        std_error: (var / n).sqrt(),
        sample_stds: keep_samples.then_some(stds),
    })
}

/// Bootstrap for every group size in `sizes` that the population can supply.
pub fn bootstrap_curve(
    caps: &[f64],
    sizes: impl IntoIterator<Item = usize>,
    samples: usize,
    seed: u64,
) -> Result<Vec<BootstrapResult>, StatsError> {
    sizes
        .into_iter()
        .filter(|&x| x <= caps.len())
        .map(|x| bootstrap_cap_std(caps, x, samples, seed, false))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_std_examples() {
        assert_eq!(cap_std(&[7.5, 7.5, 7.5]).unwrap(), 0.0);
        assert_eq!(cap_std(&[0.0, 10.0]).unwrap(), 5.0);
        assert_eq!(cap_std(&[42.0]).unwrap(), 0.0);
        assert_eq!(cap_std(&[]), Err(StatsError::EmptyList));
    }

    #[test]
    fn equal_caps_give_zero() {
        let r = bootstrap_cap_std(&[0.3; 9], 4, 500, 1, false).unwrap();
        assert_eq!(r.mean_std, 0.0);
    }

    #[test]
    fn single_possible_group() {
        let r = bootstrap_cap_std(&[0.0, 10.0], 2, 100, 5, false).unwrap();
        assert_eq!(r.mean_std, 5.0);
    }

    #[test]
    fn whole_catalog_group_is_exact() {
        let caps = [3.1e9, 7.7e6, 1.234_567e10];
        let r = bootstrap_cap_std(&caps, 3, 1000, 2, false).unwrap();
        assert_eq!(r.mean_std, cap_std(&caps).unwrap());
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn three_company_catalog_converges() {
        // Pairs of {0, 6, 12} have stds 3, 6, 3.
        let r = bootstrap_cap_std(&[0.0, 6.0, 12.0], 2, 20_000, 11, false).unwrap();
        assert!((r.mean_std - 4.0).abs() <= 3.0 * r.std_error, "{r:?}");
    }

    #[test]
    fn reproducible_and_seed_sensitive() {
        let caps: Vec<f64> = (1..50).map(|i| (i * i) as f64).collect();
        let a = bootstrap_cap_std(&caps, 5, 1000, 9, true).unwrap();
        let b = bootstrap_cap_std(&caps, 5, 1000, 9, true).unwrap();
        let c = bootstrap_cap_std(&caps, 5, 1000, 10, true).unwrap();
        assert_eq!(a.mean_std.to_bits(), b.mean_std.to_bits());
        assert_eq!(a.sample_stds, b.sample_stds);
        assert_ne!(a.mean_std, c.mean_std);
    }

    #[test]
    fn group_size_checked() {
        assert!(matches!(
            bootstrap_cap_std(&[1.0, 2.0], 3, 10, 0, false),
            Err(StatsError::GroupTooLarge {
                x: 3,
                population: 2
            })
        ));
        assert!(bootstrap_cap_std(&[1.0, 2.0], 1, 10, 0, false).is_err());
        let curve = bootstrap_curve(&[1.0, 2.0, 4.0], DEFAULT_GROUP_SIZES, 10, 0).unwrap();
        assert_eq!(curve.iter().map(|r| r.x).collect::<Vec<_>>(), vec![2, 3]);
    }
}
