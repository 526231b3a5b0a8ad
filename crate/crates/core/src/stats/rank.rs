//! Spearman's rho (mid-ranks) and Kendall's tau-b.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankCorrelation {
    pub value: f64,
    pub n: usize,
}

fn check(xs: &[f64], ys: &[f64]) -> Result<(), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// 1-based ranks, ties sharing the average of the ranks they span.
pub fn midranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of mid-ranks.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<RankCorrelation, StatsError> {
    check(xs, ys)?;
    let (rx, ry) = (midranks(xs), midranks(ys));
    let n = xs.len() as f64;
    // Mean rank is (n+1)/2 regardless of ties.
    let m = (n + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - m) * (b - m);
        sxx += (a - m) * (a - m);
        syy += (b - m) * (b - m);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(RankCorrelation {
        value: (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0),
        n: xs.len(),
    })
}

/// Tie-corrected Kendall tau-b via Knight's O(n log n) merge-sort count.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<RankCorrelation, StatsError> {
    check(xs, ys)?;
    let n = xs.len();
    let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let tie_pairs = |run: u64| run * (run - 1) / 2;
    let (mut x_ties, mut joint_ties) = (0u64, 0u64);
    let (mut x_run, mut joint_run) = (1u64, 1u64);
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            x_run += 1;
            if w[0].1 == w[1].1 {
                joint_run += 1;
            } else {
                joint_ties += tie_pairs(joint_run);
                joint_run = 1;
            }
        } else {
            x_ties += tie_pairs(x_run);
            joint_ties += tie_pairs(joint_run);
            x_run = 1;
            joint_run = 1;
        }
    }
    x_ties += tie_pairs(x_run);
    joint_ties += tie_pairs(joint_run);

    let mut ys_sorted: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let discordant = merge_count(&mut ys_sorted, &mut buf);

    let mut y_ties = 0u64;
    let mut y_run = 1u64;
    for w in ys_sorted.windows(2) {
        if w[0] == w[1] {
            y_run += 1;
        } else {
            y_ties += tie_pairs(y_run);
            y_run = 1;
        }
    }
    y_ties += tie_pairs(y_run);

    let total = tie_pairs(n as u64);
    if total == x_ties || total == y_ties {
        return Err(StatsError::ZeroVariance);
    }
    let numerator =
        total as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * discordant as f64;
    let denominator = ((total - x_ties) as f64 * (total - y_ties) as f64).sqrt();
    Ok(RankCorrelation {
        value: (numerator / denominator).clamp(-1.0, 1.0),
        n,
    })
}

/// Sorts `v` ascending and returns the number of strictly inverted pairs.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = v.split_at_mut(mid);
        merge_count(left, &mut buf[..mid]) + merge_count(right, &mut buf[mid..])
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j].total_cmp(&v[i]) == Ordering::Less {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    let k2 = k + mid - i;
    buf[k2..n].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}
