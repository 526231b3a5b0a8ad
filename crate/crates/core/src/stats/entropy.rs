//! Normalized Shannon entropy of the industry classes co-mentioned in a
//! tweet.
//!
//! For the X distinct companies of a tweet with class labels `c`, the
//! entropy of the empirical class distribution is divided by `log2 X`, the
//! entropy of X all-distinct labels. X = 1 gives 0.

use crate::error::StatsError;

/// Class labels of the X distinct companies of one tweet at one TRBC level.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassVector<'a> {
    pub level: usize,
    pub labels: Vec<&'a str>,
}

impl ClassVector<'_> {
    pub fn normalized_entropy(&self) -> Result<f64, StatsError> {
        normalized_class_entropy(&self.labels)
    }
}

/// Normalized entropy in `[0, 1]`: 0 iff all labels are equal, 1 iff all
/// are distinct.
pub fn normalized_class_entropy<T: Ord>(labels: &[T]) -> Result<f64, StatsError> {
    let x = labels.len();
    if x == 0 {
        return Err(StatsError::EmptyVector);
    }
    let mut sorted: Vec<&T> = labels.iter().collect();
    sorted.sort_unstable();
    let mut counts: Vec<usize> = sorted.chunk_by(|a, b| a == b).map(<[_]>::len).collect();
    if counts.len() == 1 {
        return Ok(0.0);
    }
    if counts.len() == x {
        return Ok(1.0);
    }
    // Canonical order keeps the sum identical under label permutation.
    counts.sort_unstable();
    let xf = x as f64;
    let weighted: f64 = counts.iter().map(|&n| n as f64 * (n as f64).log2()).sum();
    // H = log2 X - (1/X) sum n_i log2 n_i
    let h_norm = 1.0 - weighted / (xf * xf.log2());
    Ok(h_norm.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_values() {
        assert_eq!(normalized_class_entropy(&["A", "A", "A"]).unwrap(), 0.0);
        assert_eq!(
            normalized_class_entropy(&["A", "B", "C", "D"]).unwrap(),
            1.0
        );
        assert!((normalized_class_entropy(&["A", "A", "B", "B"]).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(normalized_class_entropy(&["A"]).unwrap(), 0.0);
        assert_eq!(
            normalized_class_entropy::<&str>(&[]),
            Err(StatsError::EmptyVector)
        );
        let cv = ClassVector {
            level: 5,
            labels: vec!["x", "y"],
        };
        assert_eq!(cv.normalized_entropy().unwrap(), 1.0);
    }

    /// Direct evaluation of -sum p log2 p / log2 X from label frequencies.
    fn direct(labels: &[u8]) -> f64 {
        let x = labels.len() as f64;
        if labels.len() == 1 {
            return 0.0;
        }
        let mut h = 0.0;
        for class in 0..=u8::MAX {
            let n = labels.iter().filter(|&&l| l == class).count();
            if n > 0 {
                let p = n as f64 / x;
                h -= p * p.log2();
            }
        }
        h / x.log2()
    }

    proptest! {
        #[test]
        fn agrees_with_direct_formula(labels in prop::collection::vec(0u8..6, 1..12)) {
            let e = normalized_class_entropy(&labels).unwrap();
            prop_assert!((e - direct(&labels)).abs() < 1e-12);
        }

        #[test]
        fn hierarchy_coarsening_never_increases(labels in prop::collection::vec(0u8..16, 1..12), parent_div in 2u8..5) {
            let coarse: Vec<u8> = labels.iter().map(|l| l / parent_div).collect();
            prop_assert!(
                normalized_class_entropy(&coarse).unwrap() <= normalized_class_entropy(&labels).unwrap()
            );
        }
    }
}
