//! Plot-ready CSV tables. Rendering is left to external tools.
//!
//! | file          | header                                                        |
//! |---------------|---------------------------------------------------------------|
//! | `curves.csv`  | `implementation,environment,episode,trials,mean,min,max`      |
//! | `profile.csv` | `implementation,tau,point,ci_lower,ci_upper`                  |
//! | `poi.csv`     | `x,y,point,ci_lower,ci_upper,significant,meaningful,better`   |

use std::collections::BTreeMap;
use std::path::Path;

use crate::bootstrap::PerformanceProfile;
use crate::error::Result;
use crate::hypothesis::PoiResult;
use crate::trial_data::TrialDataset;

use super::compare::ComparisonReport;

/// Per-episode mean, minimum and maximum across the trials of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub implementation: String,
    pub environment: String,
    pub episode: usize,
    pub trials: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

pub fn curve_rows(dataset: &TrialDataset) -> Vec<CurveRow> {
    // (implementation, environment) -> per-episode reward columns
    let mut cells: BTreeMap<(&str, &str), Vec<Vec<f64>>> = BTreeMap::new();
    for r in dataset.records() {
        let Some(rewards) = r.episode_rewards() else { continue };
        let columns = cells.entry((&r.implementation, &r.environment)).or_default();
        if columns.len() < rewards.len() {
            columns.resize(rewards.len(), Vec::new());
        }
        for (col, &v) in columns.iter_mut().zip(rewards) {
            col.push(v);
        }
    }
    cells
        .into_iter()
        .flat_map(|((imp, env), columns)| {
            columns.into_iter().enumerate().map(move |(episode, col)| CurveRow {
                implementation: imp.to_owned(),
                environment: env.to_owned(),
                episode,
                trials: col.len(),
                mean: col.iter().sum::<f64>() / col.len() as f64,
                min: col.iter().copied().fold(f64::INFINITY, f64::min),
                max: col.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}

fn to_csv<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn curve_table(dataset: &TrialDataset) -> String {
    to_csv(
        ["implementation", "environment", "episode", "trials", "mean", "min", "max"],
        curve_rows(dataset).into_iter().map(|r| {
            [
                r.implementation,
                r.environment,
                r.episode.to_string(),
                r.trials.to_string(),
                r.mean.to_string(),
                r.min.to_string(),
                r.max.to_string(),
            ]
        }),
    )
}

/// Rows grouped by implementation and ordered by τ within each group.
pub fn profile_table(profile: &PerformanceProfile) -> String {
    to_csv(
        ["implementation", "tau", "point", "ci_lower", "ci_upper"],
        profile.curves.iter().flat_map(|c| {
            c.points.iter().map(|p| {
                [
                    c.implementation.clone(),
                    p.tau.to_string(),
                    p.estimate.point.to_string(),
                    p.estimate.ci_lower.to_string(),
                    p.estimate.ci_upper.to_string(),
                ]
            })
        }),
    )
}

pub fn poi_table(poi: &[PoiResult]) -> String {
    to_csv(
        ["x", "y", "point", "ci_lower", "ci_upper", "significant", "meaningful", "better"],
        poi.iter().map(|p| {
            [
                p.x_implementation.clone(),
                p.y_implementation.clone(),
                p.estimate.point.to_string(),
                p.estimate.ci_lower.to_string(),
                p.estimate.ci_upper.to_string(),
                p.significant.to_string(),
                p.meaningful.to_string(),
                p.better.to_string(),
            ]
        }),
    )
}

/// Writes `curves.csv`, plus `profile.csv` and `poi.csv` when the report has
/// those sections. Returns the written file names.
pub fn write_plot_data(dir: &Path, dataset: &TrialDataset, report: &ComparisonReport) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        std::fs::write(dir.join(name), body)?;
        written.push(name.to_owned());
        Ok(())
    };
    put("curves.csv", curve_table(dataset))?;
    if let Some(profile) = &report.profile {
        put("profile.csv", profile_table(profile))?;
    }
    if let Some(poi) = &report.poi {
        put("poi.csv", poi_table(poi))?;
    }
    Ok(written)
}
