use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{analyze_peak, PeakAnalysis};
use super::baseline::{compute_baselines, span_info, summarize_peak_union, Baselines, SpanInfo};
use super::config::{DetectConfig, EffectiveConfig};
use super::rank::{rank_correlation_report, MarketRankCorrelation};
use super::score::{score_peak, ScoredPeak};
use super::social::{social_financial_map, SocialFinancialMap};
use crate::error::DetectError;
use crate::ingest::{CompanyCatalog, Dataset, IngestSummary};
use crate::stats::BOOTSTRAP_RNG;
use crate::timeseries::{collect_peak_tweets, detect_all_peaks};

pub const TOOL_NAME: &str = "radar";

const SCORE_NOTE: &str = "heuristic: weighted sum of retweet, cashtag, entropy and \
capitalization-spread excess over the dataset background; not a calibrated probability";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamInfo {
    pub tweets: usize,
    pub ids_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub k: f64,
    pub rng: String,
    pub config_hash: String,
    pub config: EffectiveConfig,
    pub inputs: Vec<InputFile>,
    pub stream: StreamInfo,
    pub ingest: IngestSummary,
    pub span: SpanInfo,
    pub score_note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakEntry {
    #[serde(flatten)]
    pub analysis: PeakAnalysis,
    #[serde(flatten)]
    pub scored: ScoredPeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub ticker: String,
    pub hour_utc: DateTime<Utc>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspicionReport {
    pub meta: Meta,
    pub baselines: Baselines,
    pub peaks: Vec<PeakEntry>,
    pub rank_correlations: Vec<MarketRankCorrelation>,
    /// Absent when no peak was found.
    pub social_financial: Option<SocialFinancialMap>,
    pub flags: Vec<Flag>,
}

impl SuspicionReport {
    /// Structural checks every report must pass before it is written.
    pub fn check(&self) -> Result<(), DetectError> {
        let threshold = self.meta.config.detect.flag_threshold;
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        for p in &self.peaks {
            let a = &p.analysis;
            let s = &p.scored;
            let at = || format!("{} @ {}", a.ticker, a.hour_utc);
            if s.flagged != (s.score >= threshold) {
                return Err(DetectError::Invariant(format!(
                    "flag disagrees with score for {}",
                    at()
                )));
            }
            if !unit(s.score) || !s.terms.as_array().into_iter().all(unit) {
                return Err(DetectError::Invariant(format!(
                    "score outside [0, 1] for {}",
                    at()
                )));
            }
            if !unit(a.retweet_fraction) {
                return Err(DetectError::Invariant(format!(
                    "retweet fraction outside [0, 1] for {}",
                    at()
                )));
            }
            let entropies = a
                .entropy
                .iter()
                .flat_map(|e| [e.summary.mean, e.summary.median])
                .flatten();
            if !entropies.into_iter().all(unit) {
                return Err(DetectError::Invariant(format!(
                    "entropy outside [0, 1] for {}",
                    at()
                )));
            }
        }
        let flagged: Vec<_> = self.peaks.iter().filter(|p| p.scored.flagged).collect();
        let consistent = flagged.len() == self.flags.len()
            && flagged
                .iter()
                .zip(&self.flags)
                .all(|(p, f)| p.analysis.ticker == f.ticker && p.analysis.hour_utc == f.hour_utc);
        if !consistent {
            return Err(DetectError::Invariant(
                "flag list does not match flagged peaks".into(),
            ));
        }
        Ok(())
    }
}

/// Full detection pipeline: baselines, peaks, per-peak evidence and
/// scores, rank correlations and the social-financial map.
/// `meta.inputs` is left empty for the caller to fill.
pub fn run_detection(
    dataset: &Dataset,
    catalog: &CompanyCatalog,
    config: &DetectConfig,
    seed: u64,
    keep_unknown: bool,
) -> Result<SuspicionReport, DetectError> {
    config.validate()?;
    let span = dataset.hour_span().ok_or(DetectError::EmptyDataset)?;
    let mut baselines = compute_baselines(dataset, catalog, span, config, seed)?;

    let peaks = detect_all_peaks(dataset, span, config.k, None)?;
    let sets = peaks
        .iter()
        .map(|p| collect_peak_tweets(dataset, p))
        .collect::<Result<Vec<_>, _>>()?;
    let entries = sets
        .par_iter()
        .map(|set| {
            let analysis = analyze_peak(set, dataset, catalog, &baselines)?;
            let scored = score_peak(&analysis, &baselines, config)?;
            Ok(PeakEntry { analysis, scored })
        })
        .collect::<Result<Vec<_>, DetectError>>()?;

    if !sets.is_empty() {
        baselines.peak_union = Some(summarize_peak_union(dataset, catalog, &sets));
    }
    let social_financial = match social_financial_map(dataset, catalog, &sets, config) {
        Ok(map) => Some(map),
        Err(DetectError::NoPeaks) => None,
        Err(e) => return Err(e),
    };
    let flags = entries
        .iter()
        .filter(|e| e.scored.flagged)
        .map(|e| Flag {
            ticker: e.analysis.ticker.clone(),
            hour_utc: e.analysis.hour_utc,
            score: e.scored.score,
        })
        .collect();

    let effective = EffectiveConfig {
        detect: config.clone(),
        seed,
        keep_unknown,
    };
    let summary = dataset.ingest_summary();
    let report = SuspicionReport {
        meta: Meta {
            tool: TOOL_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            k: config.k,
            rng: BOOTSTRAP_RNG.to_string(),
            config_hash: effective.hash(),
            config: effective,
            inputs: Vec::new(),
            stream: StreamInfo {
                tweets: dataset.len(),
                ids_digest: summary.ids_digest.clone(),
            },
            ingest: summary.clone(),
            span: span_info(span),
            score_note: SCORE_NOTE.to_string(),
        },
        baselines,
        peaks: entries,
        rank_correlations: rank_correlation_report(dataset, catalog, &sets),
        social_financial,
        flags,
    };
    report.check()?;
    Ok(report)
}
