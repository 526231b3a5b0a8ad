//! Two-sample Kolmogorov–Smirnov test with the asymptotic p-value.

use serde::{Deserialize, Serialize};

use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// `sup |F_a - F_b|` over the pooled support.
    pub statistic: f64,
    pub p_value: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Sorted copy of a sample, for repeated tests against one reference.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SortedSample(Vec<f64>);

impl SortedSample {
    pub fn new(values: &[f64]) -> Result<Self, StatsError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Ok(SortedSample(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, StatsError> {
    ks_sorted(&SortedSample::new(a)?, &SortedSample::new(b)?)
}

pub fn ks_sorted(a: &SortedSample, b: &SortedSample) -> Result<KsResult, StatsError> {
    let (a, b) = (a.values(), b.values());
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    // One step per distinct pooled value; runs of ties are skipped by
    // binary search, which keeps heavily tied samples cheap.
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        i += a[i..].partition_point(|&x| x <= v);
        j += b[j..].partition_point(|&x| x <= v);
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let effective = na * nb / (na + nb);
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(effective.sqrt() * d),
        n_a: a.len(),
        n_b: b.len(),
    })
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // CDF = sqrt(2 pi)/lambda * sum exp(-(2k-1)^2 pi^2 / (8 lambda^2))
        let t = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let sum: f64 = (1..=12)
            .map(|k| ((2 * k - 1) as f64).powi(2))
            .map(|m| (m * t).exp())
            .sum();
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum
    } else {
        // Q = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2)
        let t = -2.0 * lambda * lambda;
        2.0 * (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * ((k * k) as f64 * t).exp()
            })
            .sum::<f64>()
    };
    p.clamp(0.0, 1.0)
}
