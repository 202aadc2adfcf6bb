//! Goodness of fit between an empirical histogram and a predicted pmf.

use std::collections::BTreeSet;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{Histogram, SimError};
use crate::closedform::PredictionTable;

/// Bins with fewer expected counts are pooled before the chi-square test.
pub const MIN_EXPECTED: f64 = 5.0;

/// Allowed deviation of `Σ pmf` from 1.
pub const PMF_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelResidual {
    pub level: u64,
    pub observed: u64,
    pub expected: f64,
    /// Pearson residual `(observed - expected) / sqrt(expected)`; zero when
    /// nothing is expected.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitMetrics {
    pub tv: f64,
    pub chi_square: f64,
    pub dof: u64,
    pub p_value: f64,
    pub per_level: Vec<LevelResidual>,
}

/// Total variation distance and a pooled Pearson chi-square test.
///
/// Levels with expected count below [`MIN_EXPECTED`] are pooled into one
/// bin; if that bin is itself too small it is merged into the smallest
/// regular bin.
pub fn compare_distributions(hist: &Histogram, pmf: &PredictionTable) -> Result<FitMetrics, SimError> {
    if hist.is_empty() {
        return Err(SimError::EmptyHistogram);
    }
    let total: f64 = pmf.rows.iter().map(|r| r.pmf).sum();
    if (total - 1.0).abs() > PMF_SUM_TOLERANCE.max(pmf.tail_tolerance) {
        return Err(SimError::UnnormalizedPrediction(total));
    }
    let runs = hist.runs as f64;
    let levels: BTreeSet<u64> = hist.counts.keys().copied().chain(pmf.rows.iter().map(|r| r.m)).collect();

    let mut tv = 0.0;
    let mut per_level = Vec::with_capacity(levels.len());
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for &level in &levels {
        let observed = hist.count(level);
        let prob = pmf.pmf_at(level);
        let expected = prob * runs;
        tv += (observed as f64 / runs - prob).abs();
        let residual = if expected > 0.0 { (observed as f64 - expected) / expected.sqrt() } else { 0.0 };
        per_level.push(LevelResidual { level, observed, expected, residual });
        if expected >= MIN_EXPECTED {
            bins.push((observed as f64, expected));
        } else {
            pooled_obs += observed as f64;
            pooled_exp += expected;
        }
    }
    if pooled_exp >= MIN_EXPECTED || bins.is_empty() {
        bins.push((pooled_obs, pooled_exp));
    } else if let Some(smallest) = bins.iter_mut().min_by(|a, b| a.1.total_cmp(&b.1)) {
        smallest.0 += pooled_obs;
        smallest.1 += pooled_exp;
    }
    let chi_square: f64 = bins.iter().filter(|(_, e)| *e > 0.0).map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1) as u64;
    let p_value =
        if dof == 0 { 1.0 } else { ChiSquared::new(dof as f64).map(|d| d.sf(chi_square)).unwrap_or(f64::NAN) };
    Ok(FitMetrics { tv: tv / 2.0, chi_square, dof, p_value, per_level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::PredictionTable;

    fn table(pmf: &[(u64, f64)]) -> PredictionTable {
        PredictionTable::from_pmf(None, 0.0, 0, pmf.iter().copied())
    }

    #[test]
    fn proportional_histogram_has_zero_distance() {
        let h = Histogram::from_samples([0, 1, 1, 2]);
        let m = compare_distributions(&h, &table(&[(0, 0.25), (1, 0.5), (2, 0.25)])).unwrap();
        assert_eq!(m.tv, 0.0);
        assert_eq!(m.chi_square, 0.0);
    }

    #[test]
    fn disjoint_supports_have_distance_one() {
        let h = Histogram::from_samples([5, 6]);
        let m = compare_distributions(&h, &table(&[(0, 0.5), (1, 0.5)])).unwrap();
        assert!((m.tv - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_overlap() {
        let mut h = Histogram::default();
        h.add(0, 2);
        h.add(1, 2);
        let m = compare_distributions(&h, &table(&[(0, 1.0)])).unwrap();
        assert!((m.tv - 0.5).abs() < 1e-15);
        assert_eq!(m.per_level.len(), 2);
    }

    #[test]
    fn chi_square_pools_sparse_levels() {
        let mut h = Histogram::default();
        h.add(0, 500);
        h.add(1, 480);
        h.add(2, 20);
        let m = compare_distributions(&h, &table(&[(0, 0.5), (1, 0.49), (2, 0.009), (3, 0.001)])).unwrap();
        // levels 2 and 3 expect 9 and 1: pooled into a bin of 10
        assert_eq!(m.dof, 2);
        let expected = 0.0 + (480.0f64 - 490.0).powi(2) / 490.0 + (20.0f64 - 10.0).powi(2) / 10.0;
        assert!((m.chi_square - expected).abs() < 1e-9);
        assert!(m.p_value > 0.0 && m.p_value < 0.05);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            compare_distributions(&Histogram::default(), &table(&[(0, 1.0)])),
            Err(SimError::EmptyHistogram)
        ));
        let h = Histogram::from_samples([0]);
        assert!(matches!(compare_distributions(&h, &table(&[(0, 0.5)])), Err(SimError::UnnormalizedPrediction(_))));
    }
}
