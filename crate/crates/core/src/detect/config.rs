use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::DetectError;
use crate::ingest::TRBC_LEVELS;
use crate::stats::{SectorSplits, DEFAULT_BOOTSTRAP_SAMPLES, DEFAULT_GRID};
use crate::timeseries::DEFAULT_K;

/// One value per evidence term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermValues {
    pub retweet: f64,
    pub cashtags: f64,
    pub entropy: f64,
    pub cap_spread: f64,
}

impl TermValues {
    pub fn as_array(&self) -> [f64; 4] {
        [self.retweet, self.cashtags, self.entropy, self.cap_spread]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectConfig {
    pub k: f64,
    pub flag_threshold: f64,
    /// Weights of the four evidence terms; must sum to 1.
    pub weights: TermValues,
    /// Excess over background at which each term saturates.
    pub scales: TermValues,
    /// Pseudo-count shrinking the evidence of small peaks: `n / (n + prior)`.
    pub prior_tweets: f64,
    /// TRBC level used by the entropy term.
    pub entropy_level: usize,
    pub bootstrap_samples: usize,
    pub bootstrap_max_x: usize,
    pub k_grid: Vec<f64>,
    pub kde_grid: usize,
    /// Sector split override in log10 units; medians when absent.
    pub sector_splits: Option<SectorSplits>,
    /// Hour shift applied to the hour-of-day profile only.
    pub display_offset_hours: i32,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            k: DEFAULT_K,
            flag_threshold: 0.5,
            weights: TermValues {
                retweet: 0.25,
                cashtags: 0.25,
                entropy: 0.25,
                cap_spread: 0.25,
            },
            scales: TermValues {
                retweet: 0.3,
                cashtags: 2.0,
                entropy: 0.3,
                cap_spread: 1.0,
            },
            prior_tweets: 10.0,
            entropy_level: TRBC_LEVELS,
            bootstrap_samples: DEFAULT_BOOTSTRAP_SAMPLES,
            bootstrap_max_x: 22,
            k_grid: (1..=20).map(f64::from).collect(),
            kde_grid: DEFAULT_GRID,
            sector_splits: None,
            display_offset_hours: 0,
        }
    }
}

pub(crate) fn check_weights(weights: &TermValues) -> Result<(), DetectError> {
    let w = weights.as_array();
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(DetectError::BadWeights(format!(
            "weights must be non-negative: {w:?}"
        )));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(DetectError::BadWeights(format!(
            "weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

impl DetectConfig {
    pub fn from_toml(text: &str) -> Result<Self, DetectError> {
        let config: DetectConfig =
            toml::from_str(text).map_err(|e| DetectError::BadConfig(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), DetectError> {
        let bad = |m: String| Err(DetectError::BadConfig(m));
        if !(self.k.is_finite() && self.k > 0.0) {
            return bad(format!("k must be positive, got {}", self.k));
        }
        if !(0.0..=1.0).contains(&self.flag_threshold) {
            return bad(format!(
                "flag_threshold {} outside [0, 1]",
                self.flag_threshold
            ));
        }
        check_weights(&self.weights)?;
        if self
            .scales
            .as_array()
            .iter()
            .any(|s| !(s.is_finite() && *s > 0.0))
        {
            return bad("scales must be positive".into());
        }
        if !(self.prior_tweets.is_finite() && self.prior_tweets >= 0.0) {
            return bad("prior_tweets must be non-negative".into());
        }
        if !(1..=TRBC_LEVELS).contains(&self.entropy_level) {
            return bad(format!("entropy_level must be in 1..={TRBC_LEVELS}"));
        }
        if self.bootstrap_samples == 0 {
            return bad("bootstrap_samples must be positive".into());
        }
        if self.bootstrap_max_x < 2 {
            return bad("bootstrap_max_x must be at least 2".into());
        }
        if self.k_grid.is_empty() || self.k_grid.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return bad("k_grid needs positive values".into());
        }
        if self.kde_grid < 2 {
            return bad("kde_grid must be at least 2".into());
        }
        if let Some(s) = self.sector_splits {
            if !(s.financial.is_finite() && s.social.is_finite()) {
                return bad("sector_splits must be finite".into());
            }
        }
        Ok(())
    }
}

/// Everything that shapes a report besides the input bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveConfig {
    pub detect: DetectConfig,
    pub seed: u64,
    pub keep_unknown: bool,
}

impl EffectiveConfig {
    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = DetectConfig::default();
        c.validate().unwrap();
        assert_eq!(DetectConfig::from_toml("").unwrap(), c);
        assert_eq!(c.k, 10.0);
        assert_eq!(c.bootstrap_samples, 10_000);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let text = "[weights]\nretweet = 0.5\ncashtags = 0.5\nentropy = 0.5\ncap_spread = 0.0\n";
        assert!(matches!(
            DetectConfig::from_toml(text),
            Err(DetectError::BadWeights(_))
        ));
        assert!(DetectConfig::from_toml("bogus = 3").is_err());
    }

    #[test]
    fn hash_tracks_every_value() {
        let base = EffectiveConfig {
            detect: DetectConfig::default(),
            seed: 42,
            keep_unknown: false,
        };
        let h = base.hash();
        assert_eq!(h, base.clone().hash());
        let mut other = base.clone();
        other.detect.scales.entropy = 0.31;
        assert_ne!(other.hash(), h);
        let mut other = base.clone();
        other.seed = 43;
        assert_ne!(other.hash(), h);
        let mut other = base;
        other.detect.k = 7.0;
        assert_ne!(other.hash(), h);
    }
}
