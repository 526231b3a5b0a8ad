pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Median with the midpoint convention for even lengths.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// Population standard deviation; exactly zero when all values are equal.
pub fn population_std(xs: &[f64]) -> Option<f64> {
    let first = *xs.first()?;
    if xs.iter().all(|&x| x == first) {
        return Some(0.0);
    }
    let m = mean(xs)?;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    Some(var.sqrt())
}

/// Equal-width histogram of values in `[0, 1]`; 1.0 falls in the last bin.
pub fn unit_histogram(xs: &[f64], bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for &x in xs {
        let b = ((x.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
        assert_eq!(population_std(&[0.0, 10.0]), Some(5.0));
        assert_eq!(population_std(&[0.1, 0.1, 0.1]), Some(0.0));
        assert_eq!(
            unit_histogram(&[0.0, 0.05, 0.5, 1.0], 10),
            vec![2, 0, 0, 0, 0, 1, 0, 0, 0, 1]
        );
    }
}
