//! Synthetic trial logs from known reward processes.
//!
//! Each implementation gets a reward model per environment. Episodes are drawn
//! from counter-based substreams keyed by (implementation, environment,
//! trial), so generation order does not affect output. [`SyntheticTruth`]
//! records the exact distribution of each trial's `MeanReward100` and, where a
//! closed form exists, the pairwise probability of improvement.
//!
//! # Spec file
//!
//! ```toml
//! [defaults]              # optional
//! episodes_per_trial = 100
//! trials = 5
//!
//! [baselines]             # optional; enables normalized-score truth
//! Pong = { random_play = -20.7, human_play = 9.3 }
//!
//! [implementations.alpha]
//! trials = 5              # optional override
//! episodes_per_trial = 150
//!
//! [implementations.alpha.environments]
//! Pong = { model = "normal", mean = 5.0, std = 2.0 }
//! Breakout = { model = "learning_curve", start = 1.0, plateau = 300.0, ramp_midpoint = 60.0, ramp_width = 12.0, noise_std = 25.0 }
//! Qbert = { model = "uniform", lo = 100.0, hi = 900.0 }
//! Skiing = { model = "constant", value = -9000.0 }
//! ```
//!
//! Every implementation must list the same environments.

mod generate;
mod truth;

pub use generate::{generate_synthetic_trials, write_synthetic_outputs};
pub use truth::{analytic_poi, PairTruth, SyntheticTruth, TrialDistribution, TruthCell, ImplementationTruth};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalization::{BaselineEntry, BaselineTable};

pub const DEFAULT_EPISODES_PER_TRIAL: usize = 100;
pub const DEFAULT_TRIALS: usize = 5;

/// Per-episode reward process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum RewardModel {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, std: f64 },
    /// Logistic ramp from `start` to `plateau` centred on episode
    /// `ramp_midpoint`, plus Gaussian noise.
    LearningCurve {
        start: f64,
        plateau: f64,
        ramp_midpoint: f64,
        ramp_width: f64,
        noise_std: f64,
    },
}

impl RewardModel {
    pub fn validate(&self) -> std::result::Result<(), String> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite"))
            }
        };
        match *self {
            RewardModel::Constant { value } => finite("value", value),
            RewardModel::Uniform { lo, hi } => {
                finite("lo", lo)?;
                finite("hi", hi)?;
                if hi < lo {
                    return Err(format!("hi ({hi}) must be >= lo ({lo})"));
                }
                Ok(())
            }
            RewardModel::Normal { mean, std } => {
                finite("mean", mean)?;
                finite("std", std)?;
                if std < 0.0 {
                    return Err(format!("std must be >= 0, got {std}"));
                }
                Ok(())
            }
            RewardModel::LearningCurve {
                start,
                plateau,
                ramp_midpoint,
                ramp_width,
                noise_std,
            } => {
                finite("start", start)?;
                finite("plateau", plateau)?;
                finite("ramp_midpoint", ramp_midpoint)?;
                finite("ramp_width", ramp_width)?;
                finite("noise_std", noise_std)?;
                if ramp_width <= 0.0 {
                    return Err(format!("ramp_width must be > 0, got {ramp_width}"));
                }
                if noise_std < 0.0 {
                    return Err(format!("noise_std must be >= 0, got {noise_std}"));
                }
                Ok(())
            }
        }
    }

    /// Noise-free mean reward of a learning curve at `episode`.
    pub fn ramp(start: f64, plateau: f64, midpoint: f64, width: f64, episode: usize) -> f64 {
        start + (plateau - start) / (1.0 + (-(episode as f64 - midpoint) / width).exp())
    }
}

/// Reward models of one implementation.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticImplSpec {
    pub implementation: String,
    pub environments: BTreeMap<String, RewardModel>,
    pub episodes_per_trial: usize,
    pub trials: usize,
}

/// A full synthetic experiment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SyntheticSpec {
    pub implementations: Vec<SyntheticImplSpec>,
    pub baselines: Option<BaselineTable>,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::SyntheticSpec(m));
        let Some(first) = self.implementations.first() else {
            return bad("no implementations".into());
        };
        let envs: BTreeSet<&String> = first.environments.keys().collect();
        if envs.is_empty() {
            return bad(format!("implementations.{}: no environments", first.implementation));
        }
        let mut seen = BTreeSet::new();
        for spec in &self.implementations {
            let at = format!("implementations.{}", spec.implementation);
            if spec.implementation.is_empty() {
                return bad("empty implementation name".into());
            }
            if !seen.insert(&spec.implementation) {
                return bad(format!("{at}: duplicate implementation"));
            }
            if spec.trials == 0 {
                return bad(format!("{at}: trials must be >= 1"));
            }
            if spec.episodes_per_trial == 0 {
                return bad(format!("{at}: episodes_per_trial must be >= 1"));
            }
            let these: BTreeSet<&String> = spec.environments.keys().collect();
            if these != envs {
                return bad(format!(
                    "{at}: environments {:?} differ from {:?} declared by {}",
                    these, envs, first.implementation
                ));
            }
            for (env, model) in &spec.environments {
                if env.is_empty() {
                    return bad(format!("{at}: empty environment name"));
                }
                model
                    .validate()
                    .or_else(|m| bad(format!("{at}.environments.{env}: {m}")))?;
            }
        }
        if let Some(table) = &self.baselines {
            for env in &envs {
                match table.get(env) {
                    None => return bad(format!("baselines: missing environment {env}")),
                    Some(b) if b.is_degenerate() => {
                        return bad(format!("baselines.{env}: human_play equals random_play"))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Parses and validates the TOML spec format described in the module docs.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: SpecFile =
            toml::from_str(text).map_err(|e| Error::SyntheticSpec(e.to_string().trim_end().to_owned()))?;
        let episodes = file.defaults.episodes_per_trial.unwrap_or(DEFAULT_EPISODES_PER_TRIAL);
        let trials = file.defaults.trials.unwrap_or(DEFAULT_TRIALS);
        let baselines = if file.baselines.is_empty() {
            None
        } else {
            let mut table = BaselineTable::default();
            for (env, b) in file.baselines {
                table.insert(BaselineEntry::new(env, b.random_play, b.human_play))?;
            }
            Some(table)
        };
        let spec = SyntheticSpec {
            implementations: file
                .implementations
                .into_iter()
                .map(|(name, imp)| SyntheticImplSpec {
                    implementation: name,
                    environments: imp.environments,
                    episodes_per_trial: imp.episodes_per_trial.unwrap_or(episodes),
                    trials: imp.trials.unwrap_or(trials),
                })
                .collect(),
            baselines,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn environments(&self) -> Vec<String> {
        self.implementations
            .first()
            .map(|s| s.environments.keys().cloned().collect())
            .unwrap_or_default()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default)]
    defaults: Defaults,
    #[serde(default)]
    baselines: BTreeMap<String, BaselineRow>,
    implementations: BTreeMap<String, ImplFile>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct Defaults {
    episodes_per_trial: Option<usize>,
    trials: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BaselineRow {
    random_play: f64,
    human_play: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ImplFile {
    episodes_per_trial: Option<usize>,
    trials: Option<usize>,
    environments: BTreeMap<String, RewardModel>,
}
