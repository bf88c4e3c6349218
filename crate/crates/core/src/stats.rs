//! Small statistics helpers for comparing empirical distributions.

use statrs::distribution::{ChiSquared, ContinuousCDF};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl ChiSquare {
    /// True when equality is not rejected at significance `alpha`.
    pub fn accepts(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// Pearson χ² test of homogeneity for two histograms over the same categories.
/// Categories empty in both samples are dropped.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> ChiSquare {
    let len = a.len().max(b.len());
    let get = |h: &[u64], i: usize| h.get(i).copied().unwrap_or(0) as f64;
    let na: f64 = a.iter().sum::<u64>() as f64;
    let nb: f64 = b.iter().sum::<u64>() as f64;
    let total = na + nb;
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for i in 0..len {
        let (oa, ob) = (get(a, i), get(b, i));
        let col = oa + ob;
        if col == 0.0 {
            continue;
        }
        cells += 1;
        let ea = na * col / total;
        let eb = nb * col / total;
        statistic += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let df = cells.saturating_sub(1);
    let p_value = if df == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
        1.0 - dist.cdf(statistic)
    };
    ChiSquare { statistic, df, p_value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_histograms_have_zero_statistic() {
        let c = chi_square_homogeneity(&[10, 20, 30], &[10, 20, 30]);
        assert_eq!(c.statistic, 0.0);
        assert_eq!(c.df, 2);
        assert!((c.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_hand_computed_two_by_two() {
        // Table [[30, 10], [20, 20]]: expected [[25, 15], [25, 15]] -> 1 + 5/3 + 1 + 5/3.
        let c = chi_square_homogeneity(&[30, 10], &[20, 20]);
        assert!((c.statistic - (2.0 + 10.0 / 3.0)).abs() < 1e-12);
        assert_eq!(c.df, 1);
        assert!(c.p_value < 0.05);
    }

    #[test]
    fn very_different_histograms_are_rejected() {
        let c = chi_square_homogeneity(&[1000, 0], &[0, 1000]);
        assert!(!c.accepts(0.01));
    }

    #[test]
    fn empty_categories_are_dropped() {
        let c = chi_square_homogeneity(&[5, 0, 5], &[5, 0, 5]);
        assert_eq!(c.df, 1);
    }
}
