//! Per-tweet quantities shared by the baselines and the peak analysis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ingest::{CompanyCatalog, TweetRecord, TRBC_LEVELS};
use crate::stats::{mean, median, normalized_class_entropy, population_std, unit_histogram};

pub const ENTROPY_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TweetFeatures {
    /// Normalized class entropy per TRBC level; `None` without cataloged
    /// companies.
    pub entropy: Option<[f64; TRBC_LEVELS]>,
    /// Distinct cataloged companies.
    pub x: usize,
    /// Capitalization spread, for `x >= 2`.
    pub cap_std: Option<f64>,
}

pub(crate) fn tweet_features(tweet: &TweetRecord, catalog: &CompanyCatalog) -> TweetFeatures {
    let companies: Vec<_> = tweet
        .cashtags
        .iter()
        .filter_map(|t| catalog.get(t))
        .collect();
    let entropy = (!companies.is_empty()).then(|| {
        std::array::from_fn(|i| {
            let labels: Vec<&str> = companies.iter().map(|c| c.trbc.level(i + 1)).collect();
            normalized_class_entropy(&labels).expect("non-empty")
        })
    });
    let caps: Vec<f64> = companies.iter().map(|c| c.capitalization).collect();
    TweetFeatures {
        entropy,
        x: companies.len(),
        cap_std: (caps.len() >= 2).then(|| population_std(&caps).expect("non-empty")),
    }
}

/// Distribution summary of per-tweet entropies at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropySummary {
    pub level: usize,
    pub n: usize,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    /// Counts over ten equal bins of `[0, 1]`.
    pub histogram: Vec<u64>,
}

pub(crate) fn entropy_values(features: &[&TweetFeatures], level: usize) -> Vec<f64> {
    features
        .iter()
        .filter_map(|f| f.entropy.map(|e| e[level - 1]))
        .collect()
}

pub(crate) fn summarize_entropy(values: &[f64], level: usize) -> EntropySummary {
    EntropySummary {
        level,
        n: values.len(),
        mean: mean(values),
        median: median(values),
        histogram: unit_histogram(values, ENTROPY_BINS),
    }
}

/// Mean capitalization spread of the tweets with exactly `x` companies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapSpreadBin {
    pub x: usize,
    pub tweets: usize,
    pub mean_std: f64,
}

pub(crate) fn cap_spread_bins(features: &[&TweetFeatures]) -> Vec<CapSpreadBin> {
    let mut acc: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for f in features {
        if let Some(s) = f.cap_std {
            let e = acc.entry(f.x).or_default();
            e.0 += 1;
            e.1 += s;
        }
    }
    acc.into_iter()
        .map(|(x, (n, sum))| CapSpreadBin {
            x,
            tweets: n,
            mean_std: sum / n as f64,
        })
        .collect()
}
