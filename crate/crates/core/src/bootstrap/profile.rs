use serde::{Deserialize, Serialize};

use super::{aggregate, bootstrap_distributions, estimate_from, AggregationMetric, BootstrapConfig, EstimateWithCI};
use crate::error::{Error, Result};
use crate::matrix::ScoreMatrix;

/// One implementation's curve: fraction of trials scoring above each τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub implementation: String,
    pub points: Vec<ProfilePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub tau: f64,
    #[serde(flatten)]
    pub estimate: EstimateWithCI,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceProfile {
    pub tau_grid: Vec<f64>,
    pub curves: Vec<ProfileCurve>,
}

impl PerformanceProfile {
    pub fn curve(&self, implementation: &str) -> Option<&ProfileCurve> {
        self.curves.iter().find(|c| c.implementation == implementation)
    }
}

impl ProfileCurve {
    pub fn at(&self, tau: f64) -> Option<&EstimateWithCI> {
        self.points.iter().find(|p| p.tau == tau).map(|p| &p.estimate)
    }
}

/// τ from 0 to 2 in steps of 0.05.
pub fn default_tau_grid() -> Vec<f64> {
    (0..=40).map(|i| f64::from(i) / 20.0).collect()
}

fn validate_grid(tau_grid: &[f64]) -> Result<()> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidArgument("empty tau grid".into()));
    }
    if tau_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument("tau grid must be finite".into()));
    }
    if tau_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("tau grid must be strictly increasing".into()));
    }
    Ok(())
}

/// SBCI of `fraction_above(τ)` for every τ and implementation. All τ of one
/// implementation share the same resamples, so each curve (points and both
/// band edges) is non-increasing in τ.
pub fn performance_profile(
    matrix: &ScoreMatrix,
    implementations: &[String],
    tau_grid: &[f64],
    config: &BootstrapConfig,
) -> Result<PerformanceProfile> {
    validate_grid(tau_grid)?;
    let metrics: Vec<AggregationMetric> = tau_grid
        .iter()
        .map(|&tau| AggregationMetric::fraction_above(tau))
        .collect::<Result<_>>()?;
    let curves = implementations
        .iter()
        .map(|imp| {
            let dists = bootstrap_distributions(matrix, imp, &metrics, config)?;
            let pooled = matrix.complete_cells(imp)?.concat();
            let points = metrics
                .iter()
                .zip(&dists)
                .zip(tau_grid)
                .map(|((&metric, dist), &tau)| {
                    let point = aggregate(&pooled, metric)?;
                    Ok(ProfilePoint {
                        tau,
                        estimate: estimate_from(point, dist, config)?,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(ProfileCurve {
                implementation: imp.clone(),
                points,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PerformanceProfile {
        tau_grid: tau_grid.to_vec(),
        curves,
    })
}
