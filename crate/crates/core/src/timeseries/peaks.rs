//! K-sigma peak detection.
//!
//! Hour `j` of series `s` is a peak iff `s_j > mean(s) + K * sigma(s)`, with
//! the population sigma over the whole span and a strict inequality. The
//! predicate is evaluated exactly: with `n` hours, `S = sum(s)` and
//! `Q = sum(s^2)` it is equivalent to
//!
//! ```text
//! a = n*s_j - S > 0   and   a^2 > K^2 * (n*Q - S^2)
//! ```
//!
//! and `K` is a binary float, i.e. an exact dyadic rational, so the whole
//! comparison runs in integers.

use chrono::{DateTime, Utc};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{build_hourly_series, hour_to_utc, HourSpan, StockTimeSeries};
use crate::error::SeriesError;
use crate::ingest::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub ticker: String,
    /// Offset of the peak hour inside the series span.
    pub hour_index: usize,
    pub hour_utc: DateTime<Utc>,
    pub volume: u64,
    pub mean: f64,
    pub sigma: f64,
    pub threshold: f64,
    pub k: f64,
}

impl Peak {
    pub fn hour(&self) -> i64 {
        self.hour_utc.timestamp().div_euclid(3600)
    }
}

/// Exact form of the peak predicate for one series and one K.
struct ExactPredicate {
    n: BigUint,
    sum: BigUint,
    /// `K_mantissa^2 * (n*Q - S^2)`; the power-of-two part of K is applied
    /// as a shift on whichever side keeps both sides integral.
    rhs: BigUint,
    shift_rhs: usize,
    shift_lhs: usize,
}

impl ExactPredicate {
    fn new(counts: &[u64], k: f64) -> Self {
        let n = BigUint::from(counts.len());
        let sum: BigUint = counts.iter().map(|&c| BigUint::from(c)).sum();
        let sum_sq: BigUint = counts.iter().map(|&c| BigUint::from(c) * c).sum();
        let spread = &n * sum_sq - &sum * &sum;
        let (mantissa, exp) = decompose(k);
        let mantissa = BigUint::from(mantissa);
        let (shift_lhs, shift_rhs) = if exp >= 0 {
            (0, 2 * exp as usize)
        } else {
            (2 * exp.unsigned_abs() as usize, 0)
        };
        ExactPredicate {
            n,
            sum,
            rhs: &mantissa * &mantissa * spread,
            shift_rhs,
            shift_lhs,
        }
    }

    fn exceeds(&self, count: u64) -> bool {
        let scaled = &self.n * count;
        if scaled <= self.sum {
            return false;
        }
        let a = scaled - &self.sum;
        (&a * &a) << self.shift_lhs > &self.rhs << self.shift_rhs
    }
}

/// `k = mantissa * 2^exp` exactly, with an odd mantissa.
fn decompose(k: f64) -> (u64, i32) {
    let bits = k.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mantissa, mut exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    let tz = mantissa.trailing_zeros();
    mantissa >>= tz;
    exp += tz as i32;
    (mantissa, exp)
}

fn check_k(k: f64) -> Result<(), SeriesError> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(SeriesError::NonPositiveK(k))
    }
}

/// Smallest hourly volume that would be a peak of `series` at `k`, or `None`
/// when no hour of the series reaches it.
pub fn min_peak_volume(series: &StockTimeSeries, k: f64) -> Result<Option<u64>, SeriesError> {
    check_k(k)?;
    let max = series.counts().iter().copied().max().unwrap_or(0);
    let pred = ExactPredicate::new(series.counts(), k);
    if !pred.exceeds(max) {
        return Ok(None);
    }
    // exceeds(0) is always false; the predicate is monotone in the count.
    let (mut lo, mut hi) = (0u64, max);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred.exceeds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Hours of `series` exceeding `mean + k * sigma`, ascending.
pub fn detect_peaks(series: &StockTimeSeries, k: f64) -> Result<Vec<Peak>, SeriesError> {
    let Some(min_volume) = min_peak_volume(series, k)? else {
        return Ok(Vec::new());
    };
    let threshold = series.mean() + k * series.sigma();
    Ok(series
        .counts()
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c >= min_volume)
        .map(|(j, &c)| Peak {
            ticker: series.ticker.clone(),
            hour_index: j,
            hour_utc: hour_to_utc(series.start_hour + j as i64),
            volume: c,
            mean: series.mean(),
            sigma: series.sigma(),
            threshold,
            k,
        })
        .collect())
}

/// Peaks of every ticker in `tickers` (all indexed tickers when `None`),
/// sorted by (ticker, hour).
pub fn detect_all_peaks(
    dataset: &Dataset,
    span: HourSpan,
    k: f64,
    tickers: Option<&[String]>,
) -> Result<Vec<Peak>, SeriesError> {
    check_k(k)?;
    let mut tickers: Vec<&str> = match tickers {
        Some(list) => list.iter().map(String::as_str).collect(),
        None => dataset.tickers().collect(),
    };
    tickers.sort_unstable();
    tickers.dedup();
    let per_ticker: Vec<Vec<Peak>> = tickers
        .par_iter()
        .map(|t| build_hourly_series(dataset, t, span).and_then(|s| detect_peaks(&s, k)))
        .collect::<Result<_, _>>()?;
    Ok(per_ticker.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KCount {
    pub k: f64,
    pub peaks: usize,
}

/// Total peak count over `tickers` for each K.
pub fn peak_count_curve(
    dataset: &Dataset,
    tickers: &[String],
    span: HourSpan,
    k_values: &[f64],
) -> Result<Vec<KCount>, SeriesError> {
    for &k in k_values {
        check_k(k)?;
    }
    let per_ticker: Vec<Vec<usize>> = tickers
        .par_iter()
        .map(|t| {
            let series = build_hourly_series(dataset, t, span)?;
            k_values
                .iter()
                .map(|&k| {
                    let min = min_peak_volume(&series, k)?;
                    Ok(min.map_or(0, |m| series.counts().iter().filter(|&&c| c >= m).count()))
                })
                .collect::<Result<Vec<_>, SeriesError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(k_values
        .iter()
        .enumerate()
        .map(|(i, &k)| KCount {
            k,
            peaks: per_ticker.iter().map(|row| row[i]).sum(),
        })
        .collect())
}

/// The tweets that make up one peak.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakTweetSet {
    pub peak: Peak,
    /// Dataset indices, time-ordered.
    pub tweets: Vec<usize>,
    pub retweets: usize,
    /// Distinct cashtags of each member tweet.
    pub cashtag_counts: Vec<usize>,
}

impl PeakTweetSet {
    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn retweet_fraction(&self) -> f64 {
        if self.tweets.is_empty() {
            0.0
        } else {
            self.retweets as f64 / self.tweets.len() as f64
        }
    }

    pub fn mean_cashtags_per_tweet(&self) -> f64 {
        if self.cashtag_counts.is_empty() {
            0.0
        } else {
            self.cashtag_counts.iter().sum::<usize>() as f64 / self.cashtag_counts.len() as f64
        }
    }
}

/// Gather the tweets mentioning the peak's ticker during the peak hour.
pub fn collect_peak_tweets(dataset: &Dataset, peak: &Peak) -> Result<PeakTweetSet, SeriesError> {
    let hour = peak.hour();
    let postings = dataset.postings(&peak.ticker).unwrap_or(&[]);
    let start = postings.partition_point(|&i| dataset.tweet(i).hour() < hour);
    let end = postings.partition_point(|&i| dataset.tweet(i).hour() <= hour);
    let tweets = postings[start..end].to_vec();
    if tweets.len() as u64 != peak.volume {
        return Err(SeriesError::StalePeak {
            ticker: peak.ticker.clone(),
            hour,
            expected: peak.volume,
            found: tweets.len() as u64,
        });
    }
    let retweets = tweets
        .iter()
        .filter(|&&i| dataset.tweet(i).is_retweet())
        .count();
    let cashtag_counts = tweets
        .iter()
        .map(|&i| dataset.tweet(i).cashtags.len())
        .collect();
    Ok(PeakTweetSet {
        peak: peak.clone(),
        tweets,
        retweets,
        cashtag_counts,
    })
}
