//! Trial logs: parsing, validation and the per-trial `MeanReward100` summary.
//!
//! Two row formats are accepted, selected by the header line:
//!
//! ```text
//! implementation,environment,trial,episode,reward
//! implementation,environment,trial,mean_reward_100
//! ```
//!
//! The first lists one row per episode, with `episode` strictly increasing
//! within a trial. The second carries a pre-aggregated `MeanReward100` per
//! trial and skips the last-100 averaging.

use std::collections::{btree_map::Entry, BTreeMap, BTreeSet};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matrix::ScoreMatrix;
use crate::normalization::{normalize_score, BaselineTable};

pub const EPISODE_HEADER: [&str; 5] = ["implementation", "environment", "trial", "episode", "reward"];
pub const AGGREGATED_HEADER: [&str; 4] = ["implementation", "environment", "trial", "mean_reward_100"];

/// Number of trailing episodes averaged into `MeanReward100`.
pub const LAST_EPISODES: usize = 100;

/// Rewards logged for one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialRewards {
    /// Per-episode rewards in episode order.
    Episodes(Vec<f64>),
    /// A `MeanReward100` computed elsewhere.
    Aggregated(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub implementation: String,
    pub environment: String,
    pub trial_index: u32,
    pub rewards: TrialRewards,
}

impl TrialRecord {
    pub fn episodes(
        implementation: impl Into<String>,
        environment: impl Into<String>,
        trial_index: u32,
        rewards: Vec<f64>,
    ) -> Self {
        TrialRecord {
            implementation: implementation.into(),
            environment: environment.into(),
            trial_index,
            rewards: TrialRewards::Episodes(rewards),
        }
    }

    pub fn aggregated(
        implementation: impl Into<String>,
        environment: impl Into<String>,
        trial_index: u32,
        mean_reward_100: f64,
    ) -> Self {
        TrialRecord {
            implementation: implementation.into(),
            environment: environment.into(),
            trial_index,
            rewards: TrialRewards::Aggregated(mean_reward_100),
        }
    }

    /// Episode rewards, or `None` for a pre-aggregated record.
    pub fn episode_rewards(&self) -> Option<&[f64]> {
        match &self.rewards {
            TrialRewards::Episodes(r) => Some(r),
            TrialRewards::Aggregated(_) => None,
        }
    }

    fn key(&self) -> (&str, &str, u32) {
        (&self.implementation, &self.environment, self.trial_index)
    }
}

/// Mean reward over the last (up to) 100 episodes of a trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanReward100 {
    pub value: f64,
    /// `min(100, episodes)`; `None` when the record was pre-aggregated.
    pub episodes_used: Option<usize>,
}

/// Averages the last `min(100, n)` episodes. Records with fewer than 100
/// episodes average everything they have.
///
/// # Panics
/// If the record has no episodes; [`TrialDataset`] never holds such a record.
pub fn mean_reward_100(record: &TrialRecord) -> MeanReward100 {
    match &record.rewards {
        TrialRewards::Aggregated(v) => MeanReward100 {
            value: *v,
            episodes_used: None,
        },
        TrialRewards::Episodes(rewards) => {
            assert!(!rewards.is_empty(), "trial has no episodes");
            let used = rewards.len().min(LAST_EPISODES);
            let tail = &rewards[rewards.len() - used..];
            MeanReward100 {
                value: tail.iter().sum::<f64>() / used as f64,
                episodes_used: Some(used),
            }
        }
    }
}

/// A validated collection of trials with lexicographically ordered
/// environment and implementation sets.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialDataset {
    records: Vec<TrialRecord>,
    environments: Vec<String>,
    implementations: Vec<String>,
}

impl TrialDataset {
    /// Validates and orders `records` by (implementation, environment, trial).
    pub fn new(mut records: Vec<TrialRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        for r in &records {
            if r.implementation.is_empty() || r.environment.is_empty() {
                return Err(Error::InvalidArgument("empty identifier".into()));
            }
            match &r.rewards {
                TrialRewards::Episodes(e) if e.is_empty() => {
                    return Err(Error::InvalidArgument(format!(
                        "trial ({}, {}, {}) has no episodes",
                        r.implementation, r.environment, r.trial_index
                    )))
                }
                TrialRewards::Episodes(e) if e.iter().any(|v| !v.is_finite()) => {
                    return Err(Error::InvalidArgument("non-finite reward".into()))
                }
                TrialRewards::Aggregated(v) if !v.is_finite() => {
                    return Err(Error::InvalidArgument("non-finite reward".into()))
                }
                _ => {}
            }
        }
        records.sort_by(|a, b| a.key().cmp(&b.key()));
        if let Some(w) = records.windows(2).find(|w| w[0].key() == w[1].key()) {
            return Err(duplicate(&w[1]));
        }
        let environments: BTreeSet<_> = records.iter().map(|r| r.environment.clone()).collect();
        let implementations: BTreeSet<_> =
            records.iter().map(|r| r.implementation.clone()).collect();
        Ok(TrialDataset {
            records,
            environments: environments.into_iter().collect(),
            implementations: implementations.into_iter().collect(),
        })
    }

    pub fn records(&self) -> &[TrialRecord] {
        &self.records
    }

    pub fn environments(&self) -> &[String] {
        &self.environments
    }

    pub fn implementations(&self) -> &[String] {
        &self.implementations
    }

    /// Keeps only the named implementations.
    pub fn retain_implementations(&self, keep: &[String]) -> Result<Self> {
        for name in keep {
            if !self.implementations.contains(name) {
                return Err(Error::UnknownImplementation(name.clone()));
            }
        }
        let records = self
            .records
            .iter()
            .filter(|r| keep.contains(&r.implementation))
            .cloned()
            .collect();
        TrialDataset::new(records)
    }

    /// Number of trials per (environment, implementation) cell, including
    /// zero counts.
    pub fn cell_counts(&self) -> BTreeMap<(String, String), usize> {
        let mut counts: BTreeMap<(String, String), usize> = self
            .environments
            .iter()
            .flat_map(|e| self.implementations.iter().map(move |i| ((e.clone(), i.clone()), 0)))
            .collect();
        for r in &self.records {
            *counts
                .get_mut(&(r.environment.clone(), r.implementation.clone()))
                .expect("cell present") += 1;
        }
        counts
    }

    fn is_aggregated(&self) -> Result<bool> {
        let aggregated = self
            .records
            .iter()
            .filter(|r| matches!(r.rewards, TrialRewards::Aggregated(_)))
            .count();
        match aggregated {
            0 => Ok(false),
            n if n == self.records.len() => Ok(true),
            _ => Err(Error::MixedFormats),
        }
    }
}

fn duplicate(r: &TrialRecord) -> Error {
    Error::DuplicateTrial {
        implementation: r.implementation.clone(),
        environment: r.environment.clone(),
        trial: r.trial_index,
    }
}

fn malformed(line: u64, message: impl Into<String>) -> Error {
    Error::Malformed {
        line,
        message: message.into(),
    }
}

pub(crate) fn parse_real(field: &str, line: u64, what: &str) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(malformed(line, format!("invalid {what} {field:?}"))),
    }
}

/// Parses a trial log in either supported format.
pub fn parse_trial_log<R: Read>(raw: R) -> Result<TrialDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(raw);
    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Err(Error::EmptyInput),
        Some(h) => h.map_err(|e| csv_error(e, 1))?,
    };
    let header: Vec<&str> = header.iter().collect();
    let aggregated = if header == EPISODE_HEADER {
        false
    } else if header == AGGREGATED_HEADER {
        true
    } else {
        return Err(malformed(
            1,
            format!(
                "unrecognized header {:?}; expected `{}` or `{}`",
                header.join(","),
                EPISODE_HEADER.join(","),
                AGGREGATED_HEADER.join(",")
            ),
        ));
    };
    let width = if aggregated { 4 } else { 5 };

    // (implementation, environment, trial) -> (last episode, rewards)
    let mut episodes: BTreeMap<(String, String, u32), (u64, Vec<f64>)> = BTreeMap::new();
    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != width {
            return Err(malformed(
                line,
                format!("expected {width} fields, found {}", row.len()),
            ));
        }
        let implementation = &row[0];
        let environment = &row[1];
        if implementation.is_empty() || environment.is_empty() {
            return Err(malformed(line, "empty identifier"));
        }
        let trial: u32 = row[2]
            .parse()
            .map_err(|_| malformed(line, format!("invalid trial index {:?}", &row[2])))?;
        if aggregated {
            let value = parse_real(&row[3], line, "mean_reward_100")?;
            records.push(TrialRecord::aggregated(implementation, environment, trial, value));
            continue;
        }
        let episode: u64 = row[3]
            .parse()
            .map_err(|_| malformed(line, format!("invalid episode {:?}", &row[3])))?;
        let reward = parse_real(&row[4], line, "reward")?;
        match episodes.entry((implementation.to_owned(), environment.to_owned(), trial)) {
            Entry::Vacant(slot) => {
                slot.insert((episode, vec![reward]));
            }
            Entry::Occupied(mut slot) => {
                let (last, rewards) = slot.get_mut();
                if episode == 0 {
                    let (i, e, t) = slot.key();
                    return Err(Error::DuplicateTrial {
                        implementation: i.clone(),
                        environment: e.clone(),
                        trial: *t,
                    });
                }
                if episode <= *last {
                    return Err(malformed(
                        line,
                        format!("episode {episode} does not follow episode {last}"),
                    ));
                }
                *last = episode;
                rewards.push(reward);
            }
        }
    }
    records.extend(
        episodes
            .into_iter()
            .map(|((i, e, t), (_, rewards))| TrialRecord::episodes(i, e, t, rewards)),
    );
    TrialDataset::new(records)
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    malformed(line, e.to_string())
}

/// Writes `dataset` in the format it was read from. Episode indices are
/// renumbered from 0.
pub fn write_trial_log<W: Write>(dataset: &TrialDataset, out: W) -> Result<()> {
    let aggregated = dataset.is_aggregated()?;
    let mut w = csv::WriterBuilder::new().from_writer(out);
    let io = |e: csv::Error| Error::Io(e.into());
    if aggregated {
        w.write_record(AGGREGATED_HEADER).map_err(io)?;
    } else {
        w.write_record(EPISODE_HEADER).map_err(io)?;
    }
    for r in &dataset.records {
        let trial = r.trial_index.to_string();
        match &r.rewards {
            TrialRewards::Aggregated(v) => {
                w.write_record([&r.implementation, &r.environment, &trial, &v.to_string()])
                    .map_err(io)?;
            }
            TrialRewards::Episodes(rewards) => {
                for (episode, v) in rewards.iter().enumerate() {
                    w.write_record([
                        r.implementation.as_str(),
                        &r.environment,
                        &trial,
                        &episode.to_string(),
                        &v.to_string(),
                    ])
                    .map_err(io)?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Collects one value per trial into a matrix over (environment, implementation).
fn collect_matrix(
    dataset: &TrialDataset,
    mut value: impl FnMut(&TrialRecord) -> Result<f64>,
) -> Result<ScoreMatrix> {
    let envs = dataset.environments();
    let impls = dataset.implementations();
    let mut cells = vec![vec![Vec::new(); impls.len()]; envs.len()];
    // records are sorted by (implementation, environment, trial)
    for r in dataset.records() {
        let m = envs.binary_search(&r.environment).expect("known environment");
        let k = impls.binary_search(&r.implementation).expect("known implementation");
        cells[m][k].push(value(r)?);
    }
    ScoreMatrix::new(envs.to_vec(), impls.to_vec(), cells)
}

/// Raw `MeanReward100` values per cell, in game-score units.
pub fn mean_reward_matrix(dataset: &TrialDataset) -> ScoreMatrix {
    collect_matrix(dataset, |r| Ok(mean_reward_100(r).value)).expect("dataset is non-empty")
}

/// Human-normalized scores per cell.
pub fn build_score_matrix(dataset: &TrialDataset, baselines: &BaselineTable) -> Result<ScoreMatrix> {
    if let Some(env) = dataset
        .environments()
        .iter()
        .find(|e| baselines.get(e).is_none())
    {
        return Err(Error::MissingBaseline(env.clone()));
    }
    let degenerate: Vec<String> = dataset
        .environments()
        .iter()
        .filter(|e| baselines.get(e).is_some_and(|b| b.is_degenerate()))
        .cloned()
        .collect();
    if !degenerate.is_empty() {
        return Err(Error::DegenerateBaseline(degenerate));
    }
    collect_matrix(dataset, |r| {
        let baseline = baselines.get(&r.environment).expect("checked above");
        Ok(normalize_score(mean_reward_100(r).value, baseline)?.value())
    })
}
