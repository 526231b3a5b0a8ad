use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::baseline::Baselines;
use super::features::{
    cap_spread_bins, entropy_values, summarize_entropy, tweet_features, EntropySummary,
};
use crate::error::DetectError;
use crate::ingest::{CompanyCatalog, Dataset, Market, TRBC_LEVELS};
use crate::stats::{ks_sorted, SortedSample};
use crate::timeseries::PeakTweetSet;

/// Floor on the observed/bootstrap spread ratio, keeping logs finite.
const MIN_SPREAD_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelEntropy {
    #[serde(flatten)]
    pub summary: EntropySummary,
    /// KS statistic and p-value against the dataset-wide entropies.
    pub ks_d: Option<f64>,
    pub ks_p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapSpreadComparison {
    pub x: usize,
    pub tweets: usize,
    pub mean_std: f64,
    pub bootstrap_mean_std: Option<f64>,
    pub log10_ratio: Option<f64>,
}

/// Evidence computed for one peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakAnalysis {
    pub ticker: String,
    pub hour_utc: DateTime<Utc>,
    pub volume: u64,
    pub mean: f64,
    pub sigma: f64,
    pub threshold: f64,
    pub k: f64,
    pub retweets: usize,
    pub retweet_fraction: f64,
    pub mean_cashtags_per_tweet: f64,
    pub entropy: Vec<LevelEntropy>,
    pub cap_spread: Vec<CapSpreadComparison>,
    /// Tweets whose group size has a bootstrap baseline.
    pub cap_spread_tweets: usize,
    /// Tweet-weighted mean of `log10(observed / bootstrap)` spread.
    pub cap_spread_excess: Option<f64>,
    /// Stock mentions in the peak tweets, by market.
    pub market_mix: BTreeMap<Market, usize>,
}

impl PeakAnalysis {
    pub fn entropy_mean(&self, level: usize) -> Option<f64> {
        self.entropy
            .iter()
            .find(|e| e.summary.level == level)
            .and_then(|e| e.summary.mean)
    }
}

pub fn analyze_peak(
    set: &PeakTweetSet,
    dataset: &Dataset,
    catalog: &CompanyCatalog,
    baselines: &Baselines,
) -> Result<PeakAnalysis, DetectError> {
    if baselines.entropy_samples.len() != TRBC_LEVELS {
        return Err(DetectError::MissingBaseline("entropy distributions"));
    }
    if baselines.bootstrap.is_empty() {
        return Err(DetectError::MissingBaseline("bootstrap curve"));
    }
    let features: Vec<_> = set
        .tweets
        .iter()
        .map(|&i| tweet_features(dataset.tweet(i), catalog))
        .collect();
    let refs: Vec<_> = features.iter().collect();

    let mut entropy = Vec::with_capacity(TRBC_LEVELS);
    for level in 1..=TRBC_LEVELS {
        let values = entropy_values(&refs, level);
        let ks = match (values.is_empty(), baselines.entropy_sample(level)) {
            (false, Some(background)) => Some(ks_sorted(&SortedSample::new(&values)?, background)?),
            _ => None,
        };
        entropy.push(LevelEntropy {
            summary: summarize_entropy(&values, level),
            ks_d: ks.map(|k| k.statistic),
            ks_p: ks.map(|k| k.p_value),
        });
    }

    let mut cap_spread = Vec::new();
    let (mut weighted, mut counted) = (0.0, 0usize);
    for bin in cap_spread_bins(&refs) {
        let base = baselines
            .bootstrap_at(bin.x)
            .map(|b| b.mean_std)
            .filter(|&b| b > 0.0);
        let log10_ratio = base.map(|b| (bin.mean_std / b).max(MIN_SPREAD_RATIO).log10());
        if let Some(r) = log10_ratio {
            weighted += r * bin.tweets as f64;
            counted += bin.tweets;
        }
        cap_spread.push(CapSpreadComparison {
            x: bin.x,
            tweets: bin.tweets,
            mean_std: bin.mean_std,
            bootstrap_mean_std: base,
            log10_ratio,
        });
    }

    let mut market_mix = BTreeMap::new();
    for &i in &set.tweets {
        for tag in &dataset.tweet(i).cashtags {
            let market = dataset.market_of(tag).unwrap_or(Market::Others);
            *market_mix.entry(market).or_insert(0) += 1;
        }
    }

    let p = &set.peak;
    Ok(PeakAnalysis {
        ticker: p.ticker.clone(),
        hour_utc: p.hour_utc,
        volume: p.volume,
        mean: p.mean,
        sigma: p.sigma,
        threshold: p.threshold,
        k: p.k,
        retweets: set.retweets,
        retweet_fraction: set.retweet_fraction(),
        mean_cashtags_per_tweet: set.mean_cashtags_per_tweet(),
        entropy,
        cap_spread,
        cap_spread_tweets: counted,
        cap_spread_excess: (counted > 0).then(|| weighted / counted as f64),
        market_mix,
    })
}
