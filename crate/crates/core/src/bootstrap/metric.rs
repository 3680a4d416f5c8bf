use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a collection of trial scores is summarised into one number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AggregationMetric {
    Mean,
    /// Mean of the middle 50% of the sorted scores.
    InterquartileMean,
    /// Mean shortfall below 1.0 (human level), floored at zero per trial.
    OptimalityGap,
    /// Fraction of scores strictly above `tau`.
    FractionAbove { tau: f64 },
}

impl AggregationMetric {
    pub fn fraction_above(tau: f64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("tau must be finite, got {tau}")));
        }
        Ok(AggregationMetric::FractionAbove { tau })
    }
}

/// Aggregates `scores` under `metric`.
pub fn aggregate(scores: &[f64], metric: AggregationMetric) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(match metric {
        AggregationMetric::Mean => mean(scores.iter().copied()),
        AggregationMetric::OptimalityGap => mean(scores.iter().map(|s| (1.0 - s).max(0.0))),
        AggregationMetric::FractionAbove { tau } => {
            scores.iter().filter(|&&s| s > tau).count() as f64 / scores.len() as f64
        }
        AggregationMetric::InterquartileMean => {
            let mut sorted = scores.to_vec();
            sorted.sort_by(f64::total_cmp);
            interquartile_mean_sorted(&sorted)
        }
    })
}

/// Arithmetic mean, accumulated as offsets from the first value so that a
/// constant sample returns that constant exactly.
pub(crate) fn mean(mut values: impl Iterator<Item = f64>) -> f64 {
    let Some(first) = values.next() else {
        return f64::NAN;
    };
    let (sum, count) = values.fold((0.0, 1usize), |(s, c), v| (s + (v - first), c + 1));
    first + sum / count as f64
}

/// Trimmed mean over the probability mass [0.25, 0.75].
///
/// Each sorted score owns mass `1/n`; scores straddling a quartile boundary
/// contribute in proportion to the overlap, so the result is defined for every
/// `n >= 1` and reduces to the plain middle-half mean when `4 | n`. Weights
/// are counted in units of `1/(4n)` so they are exact integers.
pub(crate) fn interquartile_mean_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len() as u64;
    let (lo, hi) = (n, 3 * n);
    let origin = sorted[0];
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| {
            let start = 4 * i as u64;
            let overlap = (start + 4).min(hi).saturating_sub(start.max(lo));
            (overlap > 0).then_some(overlap as f64 * (x - origin))
        })
        .sum();
    origin + weighted / (2 * n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(aggregate(&[0.0, 1.0, 2.0, 3.0], AggregationMetric::Mean).unwrap(), 1.5);
        assert_eq!(aggregate(&[1.0; 6], AggregationMetric::OptimalityGap).unwrap(), 0.0);
        let s = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5];
        // drop two lowest and two highest: (1.0 + 1.5 + 2.0 + 2.5) / 4
        assert_eq!(aggregate(&s, AggregationMetric::InterquartileMean).unwrap(), 1.75);
        let f = AggregationMetric::fraction_above(1.0).unwrap();
        assert_eq!(aggregate(&[0.5, 1.2, 0.9, 1.1], f).unwrap(), 0.5);
    }

    #[test]
    fn fraction_above_is_strict() {
        let f = AggregationMetric::fraction_above(1.0).unwrap();
        assert_eq!(aggregate(&[1.0, 1.0], f).unwrap(), 0.0);
    }

    #[test]
    fn optimality_gap_floors_per_trial() {
        // shortfalls 0.5, 0, 0 → 0.5 / 3
        let g = aggregate(&[0.5, 1.5, 3.0], AggregationMetric::OptimalityGap).unwrap();
        assert!((g - 0.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn iqm_small_n() {
        let iqm = |s: &[f64]| aggregate(s, AggregationMetric::InterquartileMean).unwrap();
        assert_eq!(iqm(&[4.0]), 4.0);
        assert_eq!(iqm(&[1.0, 3.0]), 2.0);
        // n = 3: weights over [0.25, 0.75] are 1/12, 1/3, 1/12 of mass → (1*1 + 4*2 + 1*9)/6
        assert!((iqm(&[9.0, 1.0, 2.0]) - 18.0 / 6.0).abs() < 1e-15);
        // n = 5: mass 1/5 each; x0 gets 0, x1 gets 0.15, x2 0.2, x3 0.15, x4 0
        let v = iqm(&[0.0, 10.0, 20.0, 30.0, 40.0]);
        assert!((v - (0.15 * 10.0 + 0.2 * 20.0 + 0.15 * 30.0) / 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_samples_are_exact() {
        for v in [0.1, 0.7, -3.3, 1e-7] {
            let s = vec![v; 7];
            assert_eq!(aggregate(&s, AggregationMetric::Mean).unwrap(), v);
            assert_eq!(aggregate(&s, AggregationMetric::InterquartileMean).unwrap(), v);
        }
    }

    #[test]
    fn empty_and_bad_tau() {
        assert!(aggregate(&[], AggregationMetric::Mean).is_err());
        assert!(AggregationMetric::fraction_above(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn iqm_between_min_and_max(v in prop::collection::vec(-100.0..100.0f64, 1..40)) {
            let iqm = aggregate(&v, AggregationMetric::InterquartileMean).unwrap();
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(iqm >= lo - 1e-9 && iqm <= hi + 1e-9);
        }

        #[test]
        fn iqm_matches_plain_trim_when_divisible(v in prop::collection::vec(-100.0..100.0f64, 1..10)) {
            let mut v4: Vec<f64> = v.iter().flat_map(|&x| [x, x + 1.0, x - 1.0, x * 0.5]).collect();
            let iqm = aggregate(&v4, AggregationMetric::InterquartileMean).unwrap();
            v4.sort_by(f64::total_cmp);
            let q = v4.len() / 4;
            let middle = &v4[q..v4.len() - q];
            let plain = middle.iter().sum::<f64>() / middle.len() as f64;
            prop_assert!((iqm - plain).abs() < 1e-9);
        }
    }
}
