use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{RewardModel, SyntheticSpec};
use crate::error::{Error, Result};
use crate::trial_data::LAST_EPISODES;

pub const TRUTH_SCHEMA_VERSION: u32 = 1;

/// Exact distribution of one trial's `MeanReward100` (or normalized score).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialDistribution {
    pub mean: f64,
    pub std: f64,
    /// The distribution is Gaussian (or a point mass when `std == 0`).
    pub gaussian: bool,
}

impl TrialDistribution {
    /// Trial-level distribution when averaging the last `min(100, episodes)`
    /// independent episodes of `model`.
    pub fn of_model(model: &RewardModel, episodes: usize) -> Self {
        let k = episodes.min(LAST_EPISODES);
        let root_k = (k as f64).sqrt();
        match *model {
            RewardModel::Constant { value } => TrialDistribution { mean: value, std: 0.0, gaussian: true },
            RewardModel::Normal { mean, std } => TrialDistribution { mean, std: std / root_k, gaussian: true },
            RewardModel::Uniform { lo, hi } => TrialDistribution {
                mean: 0.5 * (lo + hi),
                std: (hi - lo) / (12.0 * k as f64).sqrt(),
                gaussian: lo == hi,
            },
            RewardModel::LearningCurve { start, plateau, ramp_midpoint, ramp_width, noise_std } => {
                let mean = (episodes - k..episodes)
                    .map(|e| RewardModel::ramp(start, plateau, ramp_midpoint, ramp_width, e))
                    .sum::<f64>()
                    / k as f64;
                TrialDistribution { mean, std: noise_std / root_k, gaussian: true }
            }
        }
    }

    /// Image under `score = (x - random) / (human - random)`.
    pub fn normalized(&self, random_play: f64, human_play: f64) -> Self {
        let span = human_play - random_play;
        TrialDistribution {
            mean: (self.mean - random_play) / span,
            std: self.std / span.abs(),
            gaussian: self.gaussian,
        }
    }

    /// Equivalent reward model when the distribution is Gaussian.
    pub fn as_model(&self) -> Option<RewardModel> {
        match (self.gaussian, self.std == 0.0) {
            (false, _) => None,
            (true, true) => Some(RewardModel::Constant { value: self.mean }),
            (true, false) => Some(RewardModel::Normal { mean: self.mean, std: self.std }),
        }
    }

    /// P(X > threshold), when Gaussian.
    pub fn prob_above(&self, threshold: f64) -> Option<f64> {
        if !self.gaussian {
            return None;
        }
        if self.std == 0.0 {
            return Some(if self.mean > threshold { 1.0 } else { 0.0 });
        }
        Some(Normal::new(self.mean, self.std).expect("positive std").sf(threshold))
    }
}

fn gaussian_params(model: &RewardModel) -> Option<(f64, f64)> {
    match *model {
        RewardModel::Constant { value } => Some((value, 0.0)),
        RewardModel::Normal { mean, std } => Some((mean, std)),
        _ => None,
    }
}

/// P(X > Y) for independent X, Y with constant or normal models:
/// `Φ((μx - μy) / sqrt(σx² + σy²))`, with ½ for equal constants.
pub fn analytic_poi(x: &RewardModel, y: &RewardModel) -> Result<f64> {
    let (Some((mx, sx)), Some((my, sy))) = (gaussian_params(x), gaussian_params(y)) else {
        return Err(Error::InvalidArgument(
            "analytic POI needs constant or normal models".into(),
        ));
    };
    let spread = sx.hypot(sy);
    if spread == 0.0 {
        return Ok(match mx.partial_cmp(&my) {
            Some(std::cmp::Ordering::Greater) => 1.0,
            Some(std::cmp::Ordering::Less) => 0.0,
            _ => 0.5,
        });
    }
    Ok(Normal::new(0.0, 1.0).expect("valid").cdf((mx - my) / spread))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthCell {
    pub implementation: String,
    pub environment: String,
    pub model: RewardModel,
    pub trials: usize,
    pub episodes_per_trial: usize,
    pub episodes_averaged: usize,
    pub mean_reward_100: TrialDistribution,
    pub normalized_score: Option<TrialDistribution>,
    /// P(score > 1) for one trial, when the score distribution is Gaussian.
    pub superhuman_probability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplementationTruth {
    pub implementation: String,
    /// Expected normalized score of a random trial, averaged over environments
    /// with equal weight.
    pub normalized_score_mean: Option<f64>,
    /// Expected fraction of trials with score > 1.
    pub superhuman_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTruth {
    pub x: String,
    pub y: String,
    /// Mean over environments of the analytic per-environment POI.
    pub poi: f64,
}

/// Oracle sidecar for a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    pub schema_version: u32,
    pub seed: u64,
    /// Whether scores (and POIs) are on the normalized scale.
    pub normalized: bool,
    pub cells: Vec<TruthCell>,
    pub implementations: Vec<ImplementationTruth>,
    pub pairwise_poi: Vec<PairTruth>,
}

impl SyntheticTruth {
    pub fn from_spec(spec: &SyntheticSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut specs: Vec<_> = spec.implementations.iter().collect();
        specs.sort_by(|a, b| a.implementation.cmp(&b.implementation));

        let mut cells = Vec::new();
        for imp in &specs {
            for (env, model) in &imp.environments {
                let raw = TrialDistribution::of_model(model, imp.episodes_per_trial);
                let normalized_score = spec.baselines.as_ref().map(|t| {
                    let b = t.get(env).expect("validated");
                    raw.normalized(b.random_play, b.human_play)
                });
                cells.push(TruthCell {
                    implementation: imp.implementation.clone(),
                    environment: env.clone(),
                    model: *model,
                    trials: imp.trials,
                    episodes_per_trial: imp.episodes_per_trial,
                    episodes_averaged: imp.episodes_per_trial.min(LAST_EPISODES),
                    mean_reward_100: raw,
                    normalized_score,
                    superhuman_probability: normalized_score.and_then(|d| d.prob_above(1.0)),
                });
            }
        }

        let score_of = |c: &TruthCell| c.normalized_score.unwrap_or(c.mean_reward_100);
        fn cells_of<'a>(cells: &'a [TruthCell], name: &'a str) -> impl Iterator<Item = &'a TruthCell> {
            cells.iter().filter(move |c| c.implementation == name)
        }
        let implementations = specs
            .iter()
            .map(|imp| {
                let mine: Vec<&TruthCell> = cells_of(&cells, &imp.implementation).collect();
                let m = mine.len() as f64;
                let normalized = spec.baselines.is_some();
                ImplementationTruth {
                    implementation: imp.implementation.clone(),
                    normalized_score_mean: normalized
                        .then(|| mine.iter().map(|c| score_of(c).mean).sum::<f64>() / m),
                    superhuman_fraction: mine
                        .iter()
                        .map(|c| c.superhuman_probability)
                        .sum::<Option<f64>>()
                        .map(|s| s / m),
                }
            })
            .collect();

        let mut pairwise_poi = Vec::new();
        for x in &specs {
            for y in specs.iter().filter(|y| y.implementation != x.implementation) {
                let per_env: Option<Vec<f64>> = cells_of(&cells, &x.implementation)
                    .zip(cells_of(&cells, &y.implementation))
                    .map(|(cx, cy)| {
                        let (mx, my) = (score_of(cx).as_model()?, score_of(cy).as_model()?);
                        analytic_poi(&mx, &my).ok()
                    })
                    .collect();
                if let Some(per_env) = per_env {
                    pairwise_poi.push(PairTruth {
                        x: x.implementation.clone(),
                        y: y.implementation.clone(),
                        poi: per_env.iter().sum::<f64>() / per_env.len() as f64,
                    });
                }
            }
        }

        Ok(SyntheticTruth {
            schema_version: TRUTH_SCHEMA_VERSION,
            seed,
            normalized: spec.baselines.is_some(),
            cells,
            implementations,
            pairwise_poi,
        })
    }

    pub fn poi(&self, x: &str, y: &str) -> Option<f64> {
        self.pairwise_poi.iter().find(|p| p.x == x && p.y == y).map(|p| p.poi)
    }

    pub fn implementation(&self, name: &str) -> Option<&ImplementationTruth> {
        self.implementations.iter().find(|i| i.implementation == name)
    }
}
