use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ingest::{CompanyCatalog, Dataset, Market};
use crate::stats::{kendall_tau, spearman_rho};
use crate::timeseries::PeakTweetSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCell {
    pub stocks: usize,
    pub rho: Option<f64>,
    pub tau: Option<f64>,
    /// Why the correlations are missing, if they are.
    pub note: Option<String>,
}

/// Capitalization against tweet count for one market, over all tweets and
/// over the tweets inside peaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketRankCorrelation {
    pub market: Market,
    pub all_tweets: RankCell,
    pub peak_tweets: RankCell,
}

fn cell(caps: &[f64], counts: &[f64]) -> RankCell {
    let rho = spearman_rho(caps, counts);
    let tau = kendall_tau(caps, counts);
    let note = rho
        .as_ref()
        .err()
        .or(tau.as_ref().err())
        .map(|e| e.to_string());
    RankCell {
        stocks: caps.len(),
        rho: rho.ok().map(|r| r.value),
        tau: tau.ok().map(|t| t.value),
        note,
    }
}

/// Every cataloged stock of a market enters its cell, including stocks
/// never mentioned (count zero).
pub fn rank_correlation_report(
    dataset: &Dataset,
    catalog: &CompanyCatalog,
    peaks: &[PeakTweetSet],
) -> Vec<MarketRankCorrelation> {
    let in_peak: BTreeSet<usize> = peaks
        .iter()
        .flat_map(|p| p.tweets.iter().copied())
        .collect();
    catalog
        .markets()
        .map(|market| {
            let tickers = catalog.market_tickers(market);
            let caps: Vec<f64> = tickers
                .iter()
                .map(|t| catalog.get(t).expect("listed").capitalization)
                .collect();
            let postings: Vec<&[usize]> = tickers
                .iter()
                .map(|t| dataset.postings(t).unwrap_or(&[]))
                .collect();
            let all: Vec<f64> = postings.iter().map(|p| p.len() as f64).collect();
            let peak: Vec<f64> = postings
                .iter()
                .map(|p| p.iter().filter(|i| in_peak.contains(i)).count() as f64)
                .collect();
            MarketRankCorrelation {
                market,
                all_tweets: cell(&caps, &all),
                peak_tweets: cell(&caps, &peak),
            }
        })
        .collect()
}
