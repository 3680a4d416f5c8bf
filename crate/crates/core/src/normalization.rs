//! Human-normalized scores.
//!
//! `score = (mean_reward - random_play) / (human_play - random_play)`, applied
//! verbatim: no clipping, and environments where humans score below random
//! play are accepted as-is.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trial_data::parse_real;

pub const BASELINE_HEADER: [&str; 3] = ["environment", "random_play", "human_play"];

/// Random-play and human-play reference rewards for one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub environment: String,
    pub random_play: f64,
    pub human_play: f64,
}

impl BaselineEntry {
    pub fn new(environment: impl Into<String>, random_play: f64, human_play: f64) -> Self {
        BaselineEntry {
            environment: environment.into(),
            random_play,
            human_play,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.human_play == self.random_play
    }
}

/// A dimensionless human-normalized score; above 1 is superhuman.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormalizedScore(f64);

impl NormalizedScore {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_superhuman(self) -> bool {
        self.0 > 1.0
    }
}

pub fn normalize_score(mean_reward: f64, baseline: &BaselineEntry) -> Result<NormalizedScore> {
    if baseline.is_degenerate() {
        return Err(Error::DegenerateBaseline(vec![baseline.environment.clone()]));
    }
    Ok(NormalizedScore(
        (mean_reward - baseline.random_play) / (baseline.human_play - baseline.random_play),
    ))
}

/// Baselines keyed by environment, iterated in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BaselineTable {
    entries: BTreeMap<String, BaselineEntry>,
}

impl BaselineTable {
    pub fn insert(&mut self, entry: BaselineEntry) -> Result<()> {
        if self.entries.contains_key(&entry.environment) {
            return Err(Error::DuplicateBaseline(entry.environment));
        }
        self.entries.insert(entry.environment.clone(), entry);
        Ok(())
    }

    pub fn get(&self, environment: &str) -> Option<&BaselineEntry> {
        self.entries.get(environment)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BaselineEntry> {
        self.entries.values()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(BASELINE_HEADER).map_err(io)?;
        for b in self.iter() {
            w.write_record([
                b.environment.clone(),
                b.random_play.to_string(),
                b.human_play.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Parses `environment,random_play,human_play` rows.
pub fn load_baseline_table<R: Read>(raw: R) -> Result<BaselineTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(raw);
    let mut rows = reader.records();
    let malformed = |line, message: String| Error::Malformed { line, message };
    match rows.next() {
        None => return Err(Error::EmptyInput),
        Some(h) => {
            let h = h.map_err(|e| malformed(1, e.to_string()))?;
            if h.iter().ne(BASELINE_HEADER) {
                return Err(malformed(
                    1,
                    format!("expected header `{}`", BASELINE_HEADER.join(",")),
                ));
            }
        }
    }
    let mut table = BaselineTable::default();
    for row in rows {
        let row = row.map_err(|e| {
            malformed(e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 3 {
            return Err(malformed(line, format!("expected 3 fields, found {}", row.len())));
        }
        if row[0].is_empty() {
            return Err(malformed(line, "empty environment".into()));
        }
        let random_play = parse_real(&row[1], line, "random_play")?;
        let human_play = parse_real(&row[2], line, "human_play")?;
        table.insert(BaselineEntry::new(&row[0], random_play, human_play))?;
    }
    Ok(table)
}
