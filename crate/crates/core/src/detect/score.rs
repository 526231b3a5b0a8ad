use serde::{Deserialize, Serialize};

use super::analysis::PeakAnalysis;
use super::baseline::Baselines;
use super::config::{check_weights, DetectConfig, TermValues};
use crate::error::DetectError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPeak {
    /// Raw excess of each signal over its background value.
    pub evidence: TermValues,
    /// Shrunk, scaled and clamped evidence in `[0, 1]`.
    pub terms: TermValues,
    pub score: f64,
    pub flagged: bool,
}

fn shrink(n: usize, prior: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 / (n as f64 + prior)
    }
}

/// Raw excess of a peak over the dataset background, per term.
pub fn peak_evidence(
    analysis: &PeakAnalysis,
    baselines: &Baselines,
    entropy_level: usize,
) -> TermValues {
    let entropy = match (
        analysis.entropy_mean(entropy_level),
        baselines.entropy_mean(entropy_level),
    ) {
        (Some(p), Some(b)) => p - b,
        _ => 0.0,
    };
    TermValues {
        retweet: analysis.retweet_fraction - baselines.retweet_fraction,
        cashtags: analysis.mean_cashtags_per_tweet - baselines.mean_cashtags_per_tweet,
        entropy,
        cap_spread: analysis.cap_spread_excess.unwrap_or(0.0),
    }
}

/// Weighted sum of the four clamped evidence terms. Small peaks are shrunk
/// toward zero evidence.
pub fn score_peak(
    analysis: &PeakAnalysis,
    baselines: &Baselines,
    config: &DetectConfig,
) -> Result<ScoredPeak, DetectError> {
    check_weights(&config.weights)?;
    let evidence = peak_evidence(analysis, baselines, config.entropy_level);
    let n = analysis.volume as usize;
    let s = shrink(n, config.prior_tweets);
    let s_cap = shrink(analysis.cap_spread_tweets, config.prior_tweets);
    let term = |e: f64, scale: f64, s: f64| (s * e / scale).clamp(0.0, 1.0);
    let terms = TermValues {
        retweet: term(evidence.retweet, config.scales.retweet, s),
        cashtags: term(evidence.cashtags, config.scales.cashtags, s),
        entropy: term(evidence.entropy, config.scales.entropy, s),
        cap_spread: term(evidence.cap_spread, config.scales.cap_spread, s_cap),
    };
    let score = config
        .weights
        .as_array()
        .iter()
        .zip(terms.as_array())
        .map(|(w, t)| w * t)
        .sum::<f64>()
        .clamp(0.0, 1.0);
    Ok(ScoredPeak {
        evidence,
        terms,
        score,
        flagged: score >= config.flag_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::fixture::config;
    use chrono::Utc;
    use proptest::prelude::*;

    fn analysis(volume: u64, rf: f64, tags: f64, excess: Option<f64>) -> PeakAnalysis {
        PeakAnalysis {
            ticker: "AAA".into(),
            hour_utc: Utc::now(),
            volume,
            mean: 1.0,
            sigma: 1.0,
            threshold: 11.0,
            k: 10.0,
            retweets: 0,
            retweet_fraction: rf,
            mean_cashtags_per_tweet: tags,
            entropy: Vec::new(),
            cap_spread: Vec::new(),
            cap_spread_tweets: volume as usize,
            cap_spread_excess: excess,
            market_mix: Default::default(),
        }
    }

    fn baselines() -> Baselines {
        Baselines {
            retweet_fraction: 0.2,
            mean_cashtags_per_tweet: 2.0,
            ..Baselines::default()
        }
    }

    #[test]
    fn background_like_peak_scores_zero() {
        let s = score_peak(&analysis(50, 0.2, 1.5, Some(-0.3)), &baselines(), &config()).unwrap();
        assert_eq!(s.score, 0.0);
        assert!(!s.flagged);
        assert!(s.evidence.cashtags < 0.0);
    }

    #[test]
    fn saturated_peak() {
        let s = score_peak(
            &analysis(10_000, 1.0, 9.0, Some(5.0)),
            &baselines(),
            &config(),
        )
        .unwrap();
        assert!((s.score - 0.75).abs() < 1e-9, "{s:?}");
        assert!(s.flagged);
    }

    #[test]
    fn shrinkage_damps_small_peaks() {
        let big = score_peak(&analysis(1000, 0.5, 2.0, None), &baselines(), &config()).unwrap();
        let small = score_peak(&analysis(3, 0.5, 2.0, None), &baselines(), &config()).unwrap();
        assert!(small.terms.retweet < big.terms.retweet);
        assert!((small.terms.retweet - 3.0 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn bad_weights() {
        let mut c = config();
        c.weights.entropy = 0.9;
        assert!(matches!(
            score_peak(&analysis(5, 0.5, 2.0, None), &baselines(), &c),
            Err(DetectError::BadWeights(_))
        ));
    }

    proptest! {
        #[test]
        fn monotone_in_each_term(
            n in 1u64..500,
            rf in 0.0f64..1.0, tags in 1.0f64..6.0, excess in -3.0f64..3.0,
            d_rf in 0.0f64..0.5, d_tags in 0.0f64..2.0, d_ex in 0.0f64..2.0,
        ) {
            let c = config();
            let b = baselines();
            let lo = score_peak(&analysis(n, rf, tags, Some(excess)), &b, &c).unwrap().score;
            let more = [
                analysis(n, (rf + d_rf).min(1.0), tags, Some(excess)),
                analysis(n, rf, tags + d_tags, Some(excess)),
                analysis(n, rf, tags, Some(excess + d_ex)),
            ];
            for a in &more {
                prop_assert!(score_peak(a, &b, &c).unwrap().score >= lo);
            }
            prop_assert!((0.0..=1.0).contains(&lo));
        }
    }
}
