use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::DetectConfig;
use super::features::{
    cap_spread_bins, entropy_values, summarize_entropy, tweet_features, CapSpreadBin,
    EntropySummary,
};
use crate::error::DetectError;
use crate::ingest::{CompanyCatalog, Dataset, TRBC_LEVELS};
use crate::stats::{bootstrap_curve, BootstrapResult, SortedSample};
use crate::timeseries::{hour_to_utc, peak_count_curve, HourSpan, KCount, PeakTweetSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourOfDay {
    /// Hour of day after the display offset.
    pub hour: u32,
    pub tweets: usize,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanInfo {
    pub start_utc: DateTime<Utc>,
    pub hours: usize,
}

/// Statistics of the union of all peak tweets, for side-by-side comparison
/// with the dataset-wide values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakUnionSummary {
    pub tweets: usize,
    pub retweet_fraction: f64,
    pub mean_cashtags_per_tweet: f64,
    pub entropy: Vec<EntropySummary>,
    pub cap_spread: Vec<CapSpreadBin>,
}

/// Dataset-wide reference values every peak is compared against.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub tweets: usize,
    pub retweet_fraction: f64,
    pub mean_cashtags_per_tweet: f64,
    /// Tweets by number of distinct cashtags.
    pub cashtag_count_histogram: BTreeMap<usize, usize>,
    pub entropy: Vec<EntropySummary>,
    pub cap_spread: Vec<CapSpreadBin>,
    pub bootstrap: Vec<BootstrapResult>,
    pub hourly_profile: Vec<HourOfDay>,
    pub peak_curve: Vec<KCount>,
    pub peak_union: Option<PeakUnionSummary>,
    /// Sorted per-tweet entropies by level; kept in memory for KS tests.
    #[serde(skip)]
    pub(crate) entropy_samples: Vec<SortedSample>,
}

impl Baselines {
    pub fn entropy_mean(&self, level: usize) -> Option<f64> {
        self.entropy
            .iter()
            .find(|e| e.level == level)
            .and_then(|e| e.mean)
    }

    pub fn bootstrap_at(&self, x: usize) -> Option<&BootstrapResult> {
        self.bootstrap.iter().find(|b| b.x == x)
    }

    pub(crate) fn entropy_sample(&self, level: usize) -> Option<&SortedSample> {
        self.entropy_samples
            .get(level - 1)
            .filter(|s| !s.is_empty())
    }
}

pub fn compute_baselines(
    dataset: &Dataset,
    catalog: &CompanyCatalog,
    span: HourSpan,
    config: &DetectConfig,
    seed: u64,
) -> Result<Baselines, DetectError> {
    if dataset.is_empty() {
        return Err(DetectError::EmptyDataset);
    }
    let tweets = dataset.tweets();
    let features: Vec<_> = tweets
        .par_iter()
        .map(|t| tweet_features(t, catalog))
        .collect();
    let refs: Vec<_> = features.iter().collect();

    let mut entropy = Vec::with_capacity(TRBC_LEVELS);
    let mut entropy_samples = Vec::with_capacity(TRBC_LEVELS);
    for level in 1..=TRBC_LEVELS {
        let values = entropy_values(&refs, level);
        entropy.push(summarize_entropy(&values, level));
        entropy_samples.push(SortedSample::new(&values)?);
    }

    let mut cashtag_count_histogram = BTreeMap::new();
    for t in tweets {
        *cashtag_count_histogram.entry(t.cashtags.len()).or_insert(0) += 1;
    }
    let n = tweets.len();
    let total_tags: usize = tweets.iter().map(|t| t.cashtags.len()).sum();

    let mut by_hour = [0usize; 24];
    for t in tweets {
        let h = (t.hour() + config.display_offset_hours as i64).rem_euclid(24);
        by_hour[h as usize] += 1;
    }

    let caps = catalog.capitalizations();
    let bootstrap = bootstrap_curve(
        &caps,
        2..=config.bootstrap_max_x,
        config.bootstrap_samples,
        seed,
    )?;

    let tickers: Vec<String> = dataset.tickers().map(String::from).collect();
    let peak_curve = peak_count_curve(dataset, &tickers, span, &config.k_grid)?;

    Ok(Baselines {
        tweets: n,
        retweet_fraction: dataset.retweet_fraction().unwrap_or(0.0),
        mean_cashtags_per_tweet: total_tags as f64 / n as f64,
        cashtag_count_histogram,
        entropy,
        cap_spread: cap_spread_bins(&refs),
        bootstrap,
        hourly_profile: by_hour
            .iter()
            .enumerate()
            .map(|(h, &c)| HourOfDay {
                hour: h as u32,
                tweets: c,
                share: c as f64 / n as f64,
            })
            .collect(),
        peak_curve,
        peak_union: None,
        entropy_samples,
    })
}

pub(crate) fn span_info(span: HourSpan) -> SpanInfo {
    SpanInfo {
        start_utc: hour_to_utc(span.start_hour),
        hours: span.hours,
    }
}

/// Summary of the distinct tweets belonging to at least one peak.
pub fn summarize_peak_union(
    dataset: &Dataset,
    catalog: &CompanyCatalog,
    peaks: &[PeakTweetSet],
) -> PeakUnionSummary {
    let mut union: Vec<usize> = peaks
        .iter()
        .flat_map(|p| p.tweets.iter().copied())
        .collect();
    union.sort_unstable();
    union.dedup();
    let features: Vec<_> = union
        .iter()
        .map(|&i| tweet_features(dataset.tweet(i), catalog))
        .collect();
    let refs: Vec<_> = features.iter().collect();
    let n = union.len();
    let retweets = union
        .iter()
        .filter(|&&i| dataset.tweet(i).is_retweet())
        .count();
    let tags: usize = union.iter().map(|&i| dataset.tweet(i).cashtags.len()).sum();
    let ratio = |a: usize| if n == 0 { 0.0 } else { a as f64 / n as f64 };
    PeakUnionSummary {
        tweets: n,
        retweet_fraction: ratio(retweets),
        mean_cashtags_per_tweet: ratio(tags),
        entropy: (1..=TRBC_LEVELS)
            .map(|l| summarize_entropy(&entropy_values(&refs, l), l))
            .collect(),
        cap_spread: cap_spread_bins(&refs),
    }
}
