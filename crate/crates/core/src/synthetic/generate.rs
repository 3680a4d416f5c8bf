use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{RewardModel, SyntheticSpec, SyntheticTruth};
use crate::error::Result;
use crate::exec::Execution;
use crate::rng::{name_key, open_unit, substream, tag};
use crate::trial_data::{write_trial_log, TrialDataset, TrialRecord};

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // inverse-CDF keeps exactly one uniform per normal draw
    Normal::new(0.0, 1.0).expect("valid").inverse_cdf(open_unit(rng))
}

fn draw(model: &RewardModel, episode: usize, rng: &mut ChaCha8Rng) -> f64 {
    match *model {
        RewardModel::Constant { value } => value,
        RewardModel::Uniform { lo, hi } => lo + (hi - lo) * open_unit(rng),
        RewardModel::Normal { mean, std } => {
            if std == 0.0 {
                mean
            } else {
                mean + std * standard_normal(rng)
            }
        }
        RewardModel::LearningCurve {
            start,
            plateau,
            ramp_midpoint,
            ramp_width,
            noise_std,
        } => {
            let base = RewardModel::ramp(start, plateau, ramp_midpoint, ramp_width, episode);
            if noise_std == 0.0 {
                base
            } else {
                base + noise_std * standard_normal(rng)
            }
        }
    }
}

/// Draws every trial of every implementation. Deterministic in `seed`
/// regardless of `execution`.
pub fn generate_synthetic_trials(
    spec: &SyntheticSpec,
    seed: u64,
    execution: Execution,
) -> Result<TrialDataset> {
    spec.validate()?;
    let units: Vec<(&str, &str, &RewardModel, usize, u32)> = spec
        .implementations
        .iter()
        .flat_map(|imp| {
            imp.environments.iter().flat_map(move |(env, model)| {
                (0..imp.trials as u32).map(move |t| {
                    (imp.implementation.as_str(), env.as_str(), model, imp.episodes_per_trial, t)
                })
            })
        })
        .collect();
    let records = execution.map_indices(units.len(), |u| {
        let (imp, env, model, episodes, trial) = units[u];
        let mut rng = substream(seed, &[tag::SYNTH, name_key(imp), name_key(env), u64::from(trial)]);
        let rewards = (0..episodes).map(|e| draw(model, e, &mut rng)).collect();
        TrialRecord::episodes(imp, env, trial, rewards)
    });
    TrialDataset::new(records)
}

/// Paths written by [`write_synthetic_outputs`].
#[derive(Debug, Clone)]
pub struct SyntheticOutputs {
    pub trials: PathBuf,
    pub truth: PathBuf,
    pub baselines: Option<PathBuf>,
}

/// Writes `trials.csv`, `truth.json` and, when the spec carries baselines,
/// `baselines.csv` into `dir`.
pub fn write_synthetic_outputs(
    spec: &SyntheticSpec,
    seed: u64,
    execution: Execution,
    dir: &Path,
) -> Result<SyntheticOutputs> {
    let dataset = generate_synthetic_trials(spec, seed, execution)?;
    let truth = SyntheticTruth::from_spec(spec, seed)?;
    std::fs::create_dir_all(dir)?;

    let trials = dir.join("trials.csv");
    let mut out = BufWriter::new(File::create(&trials)?);
    write_trial_log(&dataset, &mut out)?;
    out.flush()?;

    let truth_path = dir.join("truth.json");
    let mut out = BufWriter::new(File::create(&truth_path)?);
    serde_json::to_writer_pretty(&mut out, &truth)?;
    out.write_all(b"\n")?;
    out.flush()?;

    let baselines = match &spec.baselines {
        Some(table) => {
            let path = dir.join("baselines.csv");
            let mut out = BufWriter::new(File::create(&path)?);
            table.write_csv(&mut out)?;
            out.flush()?;
            Some(path)
        }
        None => None,
    };
    Ok(SyntheticOutputs {
        trials,
        truth: truth_path,
        baselines,
    })
}
