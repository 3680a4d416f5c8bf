//! Stratified bootstrap confidence intervals (SBCI).
//!
//! A resample draws, for every environment stratum independently, as many
//! trials with replacement as the stratum holds, pools the draws, and
//! aggregates them. The interval is the percentile interval of the resample
//! aggregates; the point estimate is the aggregate of the original scores.
//!
//! Resample `b` of implementation `k` always uses the substream keyed by
//! `(SBCI, hash(k), b)`, so any evaluation order yields the same interval.

mod metric;
mod profile;

pub use metric::{aggregate, AggregationMetric};
pub use profile::{default_tau_grid, performance_profile, PerformanceProfile, ProfileCurve, ProfilePoint};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::ScoreMatrix;
use crate::rng::{name_key, substream, tag};

pub const DEFAULT_RESAMPLES: usize = 2000;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Resampling parameters shared by every bootstrap-based estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: DEFAULT_RESAMPLES,
            confidence: DEFAULT_CONFIDENCE,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.resamples < 2 {
            return Err(Error::InvalidArgument(format!(
                "resamples must be >= 2, got {}",
                self.resamples
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

/// A point estimate with a two-sided percentile bootstrap interval.
///
/// `ci_lower <= ci_upper` always holds; the point may fall outside the
/// interval for skewed statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub point: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub confidence: f64,
    pub resamples: usize,
}

impl EstimateWithCI {
    pub fn contains(&self, value: f64) -> bool {
        self.ci_lower <= value && value <= self.ci_upper
    }

    pub fn width(&self) -> f64 {
        self.ci_upper - self.ci_lower
    }
}

/// Linear-interpolation quantile of an ascending slice.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if a == b {
        a
    } else {
        a + (h - lo as f64) * (b - a)
    }
}

/// Two-sided percentile interval of a bootstrap distribution.
pub fn percentile_interval(distribution: &[f64], confidence: f64) -> Result<(f64, f64)> {
    if distribution.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = distribution.to_vec();
    sorted.sort_by(f64::total_cmp);
    let alpha = 1.0 - confidence;
    Ok((
        quantile_sorted(&sorted, alpha / 2.0),
        quantile_sorted(&sorted, 1.0 - alpha / 2.0),
    ))
}

pub(crate) fn estimate_from(
    point: f64,
    distribution: &[f64],
    config: &BootstrapConfig,
) -> Result<EstimateWithCI> {
    let (ci_lower, ci_upper) = percentile_interval(distribution, config.confidence)?;
    Ok(EstimateWithCI {
        point,
        ci_lower,
        ci_upper,
        confidence: config.confidence,
        resamples: config.resamples,
    })
}

/// Appends one stratified resample of `cells` to `out`.
pub(crate) fn resample_into(cells: &[&[f64]], rng: &mut impl Rng, out: &mut Vec<f64>) {
    for cell in cells {
        let n = cell.len();
        out.extend((0..n).map(|_| cell[rng.random_range(0..n)]));
    }
}

/// One stratified resample of `implementation`, grouped by stratum.
///
/// Stratum `m` receives exactly as many draws as it has trials, each drawn
/// with replacement from that stratum only.
pub fn stratified_resample(
    matrix: &ScoreMatrix,
    implementation: &str,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<f64>>> {
    let cells = matrix.complete_cells(implementation)?;
    Ok(cells
        .iter()
        .map(|cell| {
            let mut out = Vec::with_capacity(cell.len());
            resample_into(std::slice::from_ref(cell), rng, &mut out);
            out
        })
        .collect())
}

/// Bootstrap distributions of several metrics, computed from a shared set of
/// resamples. `result[j][b]` is metric `j` on resample `b`.
pub fn bootstrap_distributions(
    matrix: &ScoreMatrix,
    implementation: &str,
    metrics: &[AggregationMetric],
    config: &BootstrapConfig,
) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let cells = matrix.complete_cells(implementation)?;
    let total: usize = cells.iter().map(|c| c.len()).sum();
    let key = name_key(implementation);
    let per_resample = config.execution.map_indices(config.resamples, |b| {
        let mut rng = substream(config.seed, &[tag::SBCI, key, b as u64]);
        let mut pooled = Vec::with_capacity(total);
        resample_into(&cells, &mut rng, &mut pooled);
        aggregate_many(&mut pooled, metrics)
    });
    let mut out = vec![Vec::with_capacity(config.resamples); metrics.len()];
    for row in per_resample {
        for (dist, v) in out.iter_mut().zip(row) {
            dist.push(v);
        }
    }
    Ok(out)
}

/// Evaluates every metric on one (non-empty) sample, sorting it once.
fn aggregate_many(sample: &mut [f64], metrics: &[AggregationMetric]) -> Vec<f64> {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    metrics
        .iter()
        .map(|&m| match m {
            AggregationMetric::InterquartileMean => metric::interquartile_mean_sorted(sample),
            AggregationMetric::FractionAbove { tau } => {
                (sample.len() - sample.partition_point(|&s| s <= tau)) as f64 / n
            }
            other => aggregate(sample, other).expect("non-empty sample"),
        })
        .collect()
}

/// Stratified bootstrap estimate of `metric` for one implementation.
pub fn sbci(
    matrix: &ScoreMatrix,
    implementation: &str,
    metric: AggregationMetric,
    config: &BootstrapConfig,
) -> Result<EstimateWithCI> {
    let dist = bootstrap_distributions(matrix, implementation, &[metric], config)?;
    let pooled: Vec<f64> = matrix.complete_cells(implementation)?.concat();
    let point = aggregate(&pooled, metric)?;
    estimate_from(point, &dist[0], config)
}
