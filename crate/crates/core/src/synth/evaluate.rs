use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::truth::{ExpectedPeak, GroundTruth};
use crate::detect::SuspicionReport;
use crate::error::SynthError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// Detected peaks neither flagged nor expected.
    pub tn: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// `None` when nothing was flagged.
    pub precision: Option<f64>,
    /// `None` when the truth holds no expected peak.
    pub recall: Option<f64>,
    pub confusion: Confusion,
    pub expected_peaks: usize,
    /// Expected peaks that the detector found at all, flagged or not.
    pub expected_detected: usize,
    pub flagged: usize,
    pub false_positives: Vec<ExpectedPeak>,
    pub missed: Vec<ExpectedPeak>,
}

/// Scores a report's flags against the generator's expected peaks.
pub fn evaluate(report: &SuspicionReport, truth: &GroundTruth) -> Result<Evaluation, SynthError> {
    if report.meta.stream.ids_digest != truth.ids_digest {
        return Err(SynthError::StreamMismatch(format!(
            "report {} vs truth {}",
            report.meta.stream.ids_digest, truth.ids_digest
        )));
    }
    let expected: BTreeSet<&ExpectedPeak> = truth.expected_peaks().collect();
    let key = |ticker: &str, hour_utc| ExpectedPeak {
        ticker: ticker.to_string(),
        hour_utc,
    };
    let flagged: BTreeSet<ExpectedPeak> = report
        .flags
        .iter()
        .map(|f| key(&f.ticker, f.hour_utc))
        .collect();
    let detected: BTreeSet<ExpectedPeak> = report
        .peaks
        .iter()
        .map(|p| key(&p.analysis.ticker, p.analysis.hour_utc))
        .collect();

    let tp = flagged.iter().filter(|p| expected.contains(p)).count();
    let false_positives: Vec<ExpectedPeak> = flagged
        .iter()
        .filter(|p| !expected.contains(p))
        .cloned()
        .collect();
    let missed: Vec<ExpectedPeak> = expected
        .iter()
        .filter(|p| !flagged.contains(*p))
        .map(|p| (*p).clone())
        .collect();
    let tn = detected
        .iter()
        .filter(|p| !flagged.contains(*p) && !expected.contains(p))
        .count();
    let ratio = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
    Ok(Evaluation {
        precision: ratio(tp, flagged.len()),
        recall: ratio(tp, expected.len()),
        confusion: Confusion {
            tp,
            fp: false_positives.len(),
            fn_: missed.len(),
            tn,
        },
        expected_peaks: expected.len(),
        expected_detected: expected.iter().filter(|p| detected.contains(*p)).count(),
        flagged: flagged.len(),
        false_positives,
        missed,
    })
}
