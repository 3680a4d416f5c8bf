#![allow(dead_code)]

use std::collections::BTreeMap;

use interchange::normalization::{BaselineEntry, BaselineTable};
use interchange::synthetic::{generate_synthetic_trials, RewardModel, SyntheticImplSpec, SyntheticSpec};
use interchange::{parse_trial_log, write_trial_log, Execution, TrialDataset};

pub const HIGH: [&str; 3] = ["impl_a", "impl_b", "impl_c"];
pub const LOW: [&str; 2] = ["impl_d", "impl_e"];

/// Baselines with `random_play = 10m - 5`, `human_play = random + 100 (m + 1)`.
pub fn pattern_baselines(envs: usize) -> BaselineTable {
    let mut t = BaselineTable::default();
    for m in 0..envs {
        let random = 10.0 * m as f64 - 5.0;
        t.insert(BaselineEntry::new(format!("env{m:02}"), random, random + 100.0 * (m + 1) as f64))
            .unwrap();
    }
    t
}

/// Five implementations over ten environments: three plateau above human
/// level (normalized ~1.25), two well below (~0.55-0.6). Each trial's
/// normalized `MeanReward100` has standard deviation 0.25.
pub fn pattern_spec() -> SyntheticSpec {
    let baselines = pattern_baselines(10);
    let plateaus = [
        ("impl_a", 1.25),
        ("impl_b", 1.22),
        ("impl_c", 1.28),
        ("impl_d", 0.55),
        ("impl_e", 0.60),
    ];
    let implementations = plateaus
        .iter()
        .map(|&(name, level)| SyntheticImplSpec {
            implementation: name.into(),
            environments: baselines
                .iter()
                .map(|b| {
                    let span = b.human_play - b.random_play;
                    (
                        b.environment.clone(),
                        RewardModel::LearningCurve {
                            start: b.random_play,
                            plateau: b.random_play + level * span,
                            ramp_midpoint: 20.0,
                            ramp_width: 5.0,
                            noise_std: 2.5 * span,
                        },
                    )
                })
                .collect(),
            episodes_per_trial: 150,
            trials: 5,
        })
        .collect();
    SyntheticSpec {
        implementations,
        baselines: Some(baselines),
    }
}

/// Trial-level normal scores (one episode per trial) against identity
/// baselines, so scores equal rewards.
pub fn normal_spec(models: &[(&str, Vec<(f64, f64)>)], trials: usize) -> SyntheticSpec {
    let envs = models[0].1.len();
    let mut table = BaselineTable::default();
    for m in 0..envs {
        table.insert(BaselineEntry::new(format!("s{m}"), 0.0, 1.0)).unwrap();
    }
    SyntheticSpec {
        implementations: models
            .iter()
            .map(|(name, per_env)| SyntheticImplSpec {
                implementation: (*name).into(),
                environments: per_env
                    .iter()
                    .enumerate()
                    .map(|(m, &(mean, std))| (format!("s{m}"), RewardModel::Normal { mean, std }))
                    .collect::<BTreeMap<_, _>>(),
                episodes_per_trial: 1,
                trials,
            })
            .collect(),
        baselines: Some(table),
    }
}

/// Generates the spec's trials and sends them through the on-disk trial-log
/// format, exercising the parser.
pub fn generate_via_log(spec: &SyntheticSpec, seed: u64) -> TrialDataset {
    let ds = generate_synthetic_trials(spec, seed, Execution::Parallel).unwrap();
    let mut buf = Vec::new();
    write_trial_log(&ds, &mut buf).unwrap();
    parse_trial_log(buf.as_slice()).unwrap()
}
