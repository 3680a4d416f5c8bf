use serde::{Deserialize, Serialize};

use super::VerdictThresholds;
use crate::bootstrap::{estimate_from, resample_into, BootstrapConfig, EstimateWithCI};
use crate::error::{Error, Result};
use crate::matrix::ScoreMatrix;
use crate::rng::{name_key, substream, tag};

/// Probability that `x` improves on `y`, with its Neyman-Pearson verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiResult {
    pub x_implementation: String,
    pub y_implementation: String,
    pub estimate: EstimateWithCI,
    /// point > 0.5 and 0.5 lies outside the interval.
    pub significant: bool,
    /// CI upper bound above the meaningfulness threshold.
    pub meaningful: bool,
    /// significant and meaningful.
    pub better: bool,
}

impl PoiResult {
    pub fn new(
        x_implementation: impl Into<String>,
        y_implementation: impl Into<String>,
        estimate: EstimateWithCI,
        meaningful_threshold: f64,
    ) -> Self {
        let significant = estimate.point > 0.5 && !estimate.contains(0.5);
        let meaningful = estimate.ci_upper > meaningful_threshold;
        PoiResult {
            x_implementation: x_implementation.into(),
            y_implementation: y_implementation.into(),
            estimate,
            significant,
            meaningful,
            better: significant && meaningful,
        }
    }
}

/// Sum of S(x, y) over all pairs, in half units (win = 2, tie = 1).
/// `y_sorted` must be ascending.
fn half_units(x: &[f64], y_sorted: &[f64]) -> u64 {
    x.iter()
        .map(|&xi| {
            let below = y_sorted.partition_point(|&v| v < xi);
            let at_or_below = below + y_sorted[below..].partition_point(|&v| v <= xi);
            2 * below as u64 + (at_or_below - below) as u64
        })
        .sum()
}

fn poi_sorted(x: &[f64], y_sorted: &[f64]) -> f64 {
    half_units(x, y_sorted) as f64 / (2 * x.len() as u64 * y_sorted.len() as u64) as f64
}

/// Mann-Whitney probability that a random trial of `x` beats one of `y`,
/// counting ties as one half. Unequal sizes divide by `|x| * |y|`.
pub fn poi_env(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut y_sorted = y.to_vec();
    y_sorted.sort_by(f64::total_cmp);
    Ok(poi_sorted(x, &y_sorted))
}

fn mean_over_strata(x_cells: &[&[f64]], y_cells: &[&[f64]]) -> f64 {
    let sum: f64 = x_cells
        .iter()
        .zip(y_cells)
        .map(|(x, y)| {
            let mut y_sorted = y.to_vec();
            y_sorted.sort_by(f64::total_cmp);
            poi_sorted(x, &y_sorted)
        })
        .sum();
    sum / x_cells.len() as f64
}

/// Unweighted mean of the per-environment POIs.
pub fn poi_overall(matrix: &ScoreMatrix, x: &str, y: &str) -> Result<f64> {
    let x_cells = matrix.complete_cells(x)?;
    let y_cells = matrix.complete_cells(y)?;
    Ok(mean_over_strata(&x_cells, &y_cells))
}

/// Splits pooled stratified draws back into per-stratum slices.
fn split_cells<'a>(pooled: &'a [f64], sizes: &[usize]) -> Vec<&'a [f64]> {
    let mut rest = pooled;
    sizes
        .iter()
        .map(|&n| {
            let (head, tail) = rest.split_at(n);
            rest = tail;
            head
        })
        .collect()
}

/// POI of `x` over `y` with a stratified bootstrap interval and verdict.
///
/// Each resample redraws `x` and `y` independently within every stratum.
/// The substream is keyed by the unordered pair, so the (y, x) distribution
/// is exactly the complement of the (x, y) one.
pub fn poi_with_ci(
    matrix: &ScoreMatrix,
    x: &str,
    y: &str,
    config: &BootstrapConfig,
    thresholds: &VerdictThresholds,
) -> Result<PoiResult> {
    config.validate()?;
    if x == y {
        return Err(Error::InvalidArgument(format!("cannot compare {x} with itself")));
    }
    let x_cells = matrix.complete_cells(x)?;
    let y_cells = matrix.complete_cells(y)?;
    let point = mean_over_strata(&x_cells, &y_cells);

    let x_first = x < y;
    let (first, second) = if x_first { (&x_cells, &y_cells) } else { (&y_cells, &x_cells) };
    let key = if x_first { [name_key(x), name_key(y)] } else { [name_key(y), name_key(x)] };
    let first_sizes: Vec<usize> = first.iter().map(|c| c.len()).collect();
    let second_sizes: Vec<usize> = second.iter().map(|c| c.len()).collect();

    let distribution = config.execution.map_indices(config.resamples, |b| {
        let mut rng = substream(config.seed, &[tag::POI, key[0], key[1], b as u64]);
        let mut a = Vec::new();
        let mut c = Vec::new();
        resample_into(first, &mut rng, &mut a);
        resample_into(second, &mut rng, &mut c);
        let (a, c) = (split_cells(&a, &first_sizes), split_cells(&c, &second_sizes));
        if x_first {
            mean_over_strata(&a, &c)
        } else {
            mean_over_strata(&c, &a)
        }
    });
    let estimate = estimate_from(point, &distribution, config)?;
    Ok(PoiResult::new(x, y, estimate, thresholds.meaningful))
}

/// `poi_with_ci` for every ordered pair of distinct implementations.
pub fn poi_matrix(
    matrix: &ScoreMatrix,
    implementations: &[String],
    config: &BootstrapConfig,
    thresholds: &VerdictThresholds,
) -> Result<Vec<PoiResult>> {
    let mut out = Vec::new();
    for x in implementations {
        for y in implementations.iter().filter(|y| *y != x) {
            out.push(poi_with_ci(matrix, x, y, config, thresholds)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use proptest::prelude::*;

    /// Direct double sum over all pairs.
    fn brute_force(x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for &a in x {
            for &b in y {
                s += if b < a { 1.0 } else if b == a { 0.5 } else { 0.0 };
            }
        }
        s / (x.len() * y.len()) as f64
    }

    fn cfg(resamples: usize) -> BootstrapConfig {
        BootstrapConfig { resamples, confidence: 0.95, seed: 42, execution: Execution::Sequential }
    }

    fn two_impls(x: Vec<Vec<f64>>, y: Vec<Vec<f64>>) -> ScoreMatrix {
        let strata = (0..x.len()).map(|m| format!("E{m}")).collect();
        let cells = x.into_iter().zip(y).map(|(a, b)| vec![a, b]).collect();
        ScoreMatrix::new(strata, vec!["X".into(), "Y".into()], cells).unwrap()
    }

    #[test]
    fn env_examples() {
        assert_eq!(poi_env(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.5);
        assert_eq!(poi_env(&[5.0, 6.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(poi_env(&[1.0, 3.0], &[2.0, 2.0]).unwrap(), 0.5);
        assert_eq!(poi_env(&[1.0, 2.0], &[2.0, 3.0]).unwrap(), 0.125);
        assert!(poi_env(&[], &[1.0]).is_err());
        assert!(poi_env(&[1.0], &[]).is_err());
    }

    #[test]
    fn overall_examples() {
        let m = two_impls(vec![vec![1.0, 2.0]], vec![vec![0.5, 3.0]]);
        assert_eq!(poi_overall(&m, "X", "Y").unwrap(), poi_env(&[1.0, 2.0], &[0.5, 3.0]).unwrap());

        let m = two_impls(vec![vec![5.0, 6.0], vec![9.0]], vec![vec![1.0], vec![2.0, 3.0]]);
        assert_eq!(poi_overall(&m, "X", "Y").unwrap(), 1.0);

        // per-env 0.5 and 1.0
        let m = two_impls(vec![vec![1.0, 3.0], vec![5.0, 6.0]], vec![vec![2.0, 2.0], vec![1.0, 2.0]]);
        assert_eq!(poi_overall(&m, "X", "Y").unwrap(), 0.75);
    }

    #[test]
    fn identical_singletons_are_not_better() {
        let m = two_impls(vec![vec![0.3], vec![1.1]], vec![vec![0.3], vec![1.1]]);
        let r = poi_with_ci(&m, "X", "Y", &cfg(200), &VerdictThresholds::default()).unwrap();
        assert_eq!((r.estimate.point, r.estimate.ci_lower, r.estimate.ci_upper), (0.5, 0.5, 0.5));
        assert!(!r.significant && !r.better);
    }

    #[test]
    fn strict_dominance_is_better() {
        let m = two_impls(
            vec![vec![5.0, 6.0, 7.0], vec![10.0, 11.0]],
            vec![vec![1.0, 2.0], vec![3.0, 4.0, 4.5]],
        );
        let r = poi_with_ci(&m, "X", "Y", &cfg(500), &VerdictThresholds::default()).unwrap();
        assert_eq!(r.estimate.point, 1.0);
        assert_eq!((r.estimate.ci_lower, r.estimate.ci_upper), (1.0, 1.0));
        assert!(r.significant && r.meaningful && r.better);
        let rev = poi_with_ci(&m, "Y", "X", &cfg(500), &VerdictThresholds::default()).unwrap();
        assert_eq!(rev.estimate.point, 0.0);
        assert!(!rev.better);
    }

    #[test]
    fn reversed_pair_is_complementary() {
        let m = two_impls(
            vec![vec![0.1, 0.9, 1.4, 0.3], vec![2.0, 0.2, 0.7]],
            vec![vec![0.5, 0.6, 1.0], vec![0.3, 1.9, 0.25, 0.8]],
        );
        let t = VerdictThresholds::default();
        let a = poi_with_ci(&m, "X", "Y", &cfg(400), &t).unwrap().estimate;
        let b = poi_with_ci(&m, "Y", "X", &cfg(400), &t).unwrap().estimate;
        assert!((a.point + b.point - 1.0).abs() < 1e-12);
        assert!((a.ci_lower + b.ci_upper - 1.0).abs() < 1e-12);
        assert!((a.ci_upper + b.ci_lower - 1.0).abs() < 1e-12);
    }

    #[test]
    fn verdict_flags_follow_interval() {
        let est = |point, ci_lower, ci_upper| EstimateWithCI { point, ci_lower, ci_upper, confidence: 0.95, resamples: 10 };
        let r = PoiResult::new("a", "b", est(0.7, 0.55, 0.8), 0.75);
        assert!(r.significant && r.meaningful && r.better);
        let r = PoiResult::new("a", "b", est(0.6, 0.52, 0.7), 0.75);
        assert!(r.significant && !r.meaningful && !r.better);
        let r = PoiResult::new("a", "b", est(0.7, 0.45, 0.9), 0.75);
        assert!(!r.significant && r.meaningful && !r.better);
        // point below 0.5 is never significant, even with 0.5 outside the CI
        let r = PoiResult::new("a", "b", est(0.2, 0.1, 0.3), 0.75);
        assert!(!r.significant);
    }

    #[test]
    fn self_comparison_rejected() {
        let m = two_impls(vec![vec![1.0]], vec![vec![2.0]]);
        assert!(poi_with_ci(&m, "X", "X", &cfg(10), &VerdictThresholds::default()).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            x in prop::collection::vec((0i32..6).prop_map(|v| f64::from(v) * 0.5), 1..=12),
            y in prop::collection::vec((0i32..6).prop_map(|v| f64::from(v) * 0.5), 1..=12),
        ) {
            let p = poi_env(&x, &y).unwrap();
            prop_assert_eq!(p, brute_force(&x, &y));
            let q = poi_env(&y, &x).unwrap();
            prop_assert!((p + q - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn shift_invariant(x in prop::collection::vec(-50i32..50, 1..10), y in prop::collection::vec(-50i32..50, 1..10), c in -100i32..100) {
            let f = |v: &[i32], s: i32| v.iter().map(|&a| f64::from(a + s)).collect::<Vec<_>>();
            prop_assert_eq!(poi_env(&f(&x, 0), &f(&y, 0)).unwrap(), poi_env(&f(&x, c), &f(&y, c)).unwrap());
        }

        #[test]
        fn parallel_matches_sequential(seed in any::<u64>()) {
            let m = two_impls(
                vec![vec![0.1, 0.9, 1.4], vec![2.0, 0.2]],
                vec![vec![0.5, 0.6], vec![0.3, 1.9, 0.25]],
            );
            let seq = BootstrapConfig { seed, ..cfg(300) };
            let par = BootstrapConfig { execution: Execution::Parallel, ..seq };
            let t = VerdictThresholds::default();
            prop_assert_eq!(poi_with_ci(&m, "X", "Y", &seq, &t).unwrap(), poi_with_ci(&m, "X", "Y", &par, &t).unwrap());
        }
    }
}
