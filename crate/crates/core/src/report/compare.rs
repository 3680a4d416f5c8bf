use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::AnalysisConfig;
use crate::bootstrap::{performance_profile, PerformanceProfile};
use crate::error::{Error, Result};
use crate::hypothesis::{anova_by_environment, poi_matrix, AnovaResult, PoiResult};
use crate::matrix::CellCount;
use crate::normalization::BaselineTable;
use crate::trial_data::{build_score_matrix, mean_reward_matrix, TrialDataset};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Which analyses a run performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Compare,
    Profile,
    Poi,
    Anova,
}

impl Analysis {
    fn profile(self) -> bool {
        matches!(self, Analysis::Compare | Analysis::Profile)
    }
    fn poi(self) -> bool {
        matches!(self, Analysis::Compare | Analysis::Poi)
    }
    fn anova(self) -> bool {
        matches!(self, Analysis::Compare | Analysis::Anova)
    }
    fn needs_baselines(self) -> bool {
        self.profile() || self.poi()
    }
    fn min_implementations(self) -> usize {
        if self == Analysis::Profile {
            1
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub analysis: Analysis,
    pub seed: u64,
    pub resamples: usize,
    pub confidence: f64,
    pub alpha: f64,
    pub meaningful_threshold: f64,
    pub tau_grid: Vec<f64>,
    pub environments: Vec<String>,
    pub implementations: Vec<String>,
    pub cell_counts: Vec<CellCount>,
}

/// Mean over trials of `MeanReward100` for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRewardRow {
    pub environment: String,
    pub implementation: String,
    pub trials: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Interchangeable,
    NotInterchangeable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetterPair {
    pub x: String,
    pub y: String,
}

/// `not_interchangeable` iff some pair is `better` or some environment's
/// ANOVA rejects equal means.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub rejecting_environments: Vec<String>,
    pub better_pairs: Vec<BetterPair>,
}

impl Verdict {
    pub fn from_results(anova: &[AnovaResult], poi: &[PoiResult]) -> Self {
        let rejecting_environments: Vec<String> =
            anova.iter().filter(|a| a.reject).map(|a| a.environment.clone()).collect();
        let better_pairs: Vec<BetterPair> = poi
            .iter()
            .filter(|p| p.better)
            .map(|p| BetterPair {
                x: p.x_implementation.clone(),
                y: p.y_implementation.clone(),
            })
            .collect();
        let status = if rejecting_environments.is_empty() && better_pairs.is_empty() {
            VerdictStatus::Interchangeable
        } else {
            VerdictStatus::NotInterchangeable
        };
        Verdict {
            status,
            rejecting_environments,
            better_pairs,
        }
    }
}

/// Machine-readable result of one analysis run. Sections not produced by the
/// chosen [`Analysis`] are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub metadata: ReportMetadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_rewards: Option<Vec<MeanRewardRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anova: Option<Vec<AnovaResult>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<PerformanceProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poi: Option<Vec<PoiResult>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn poi_result(&self, x: &str, y: &str) -> Option<&PoiResult> {
        self.poi
            .as_ref()?
            .iter()
            .find(|p| p.x_implementation == x && p.y_implementation == y)
    }
}

fn mean_reward_rows(dataset: &TrialDataset) -> Vec<MeanRewardRow> {
    let raw = mean_reward_matrix(dataset);
    let mut rows = Vec::new();
    for (m, env) in raw.strata().iter().enumerate() {
        for (k, imp) in raw.implementations().iter().enumerate() {
            let cell = raw.cell(m, k);
            if cell.is_empty() {
                continue;
            }
            rows.push(MeanRewardRow {
                environment: env.clone(),
                implementation: imp.clone(),
                trials: cell.len(),
                mean: cell.iter().sum::<f64>() / cell.len() as f64,
                min: cell.iter().copied().fold(f64::INFINITY, f64::min),
                max: cell.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }
    rows
}

/// Runs `analysis` over `dataset`. `baselines` may be `None` only for
/// [`Analysis::Anova`], which works on raw rewards.
pub fn run_analysis(
    analysis: Analysis,
    dataset: &TrialDataset,
    baselines: Option<&BaselineTable>,
    config: &AnalysisConfig,
) -> Result<ComparisonReport> {
    config.validate()?;
    let dataset = match &config.implementations {
        Some(keep) => dataset.retain_implementations(keep)?,
        None => dataset.clone(),
    };
    let implementations = dataset.implementations().to_vec();
    if implementations.len() < analysis.min_implementations() {
        return Err(Error::TooFewImplementations(implementations.len()));
    }
    let scores = if analysis.needs_baselines() {
        let table = baselines.ok_or_else(|| Error::InvalidArgument("baseline table required".into()))?;
        Some(build_score_matrix(&dataset, table)?)
    } else {
        None
    };
    let bootstrap = config.bootstrap();
    let thresholds = config.thresholds();

    let profile = match (&scores, analysis.profile()) {
        (Some(m), true) => Some(performance_profile(m, &implementations, &config.tau_grid, &bootstrap)?),
        _ => None,
    };
    let poi = match (&scores, analysis.poi()) {
        (Some(m), true) => Some(poi_matrix(m, &implementations, &bootstrap, &thresholds)?),
        _ => None,
    };
    let anova = if analysis.anova() {
        Some(anova_by_environment(
            &mean_reward_matrix(&dataset),
            &implementations,
            config.alpha,
        )?)
    } else {
        None
    };
    let verdict = match (&anova, &poi) {
        (Some(a), Some(p)) if analysis == Analysis::Compare => Some(Verdict::from_results(a, p)),
        _ => None,
    };

    Ok(ComparisonReport {
        schema_version: REPORT_SCHEMA_VERSION,
        metadata: ReportMetadata {
            analysis,
            seed: config.seed,
            resamples: config.resamples,
            confidence: config.confidence,
            alpha: config.alpha,
            meaningful_threshold: config.meaningful_threshold,
            tau_grid: config.tau_grid.clone(),
            environments: dataset.environments().to_vec(),
            implementations,
            cell_counts: mean_reward_matrix(&dataset).counts(),
        },
        mean_rewards: Some(mean_reward_rows(&dataset)),
        anova,
        profile,
        poi,
        verdict,
    })
}

/// Full pipeline: profiles, pairwise POI, per-environment ANOVA and verdict.
pub fn cmd_compare(dataset: &TrialDataset, baselines: &BaselineTable, config: &AnalysisConfig) -> Result<ComparisonReport> {
    run_analysis(Analysis::Compare, dataset, Some(baselines), config)
}

pub fn cmd_profile(dataset: &TrialDataset, baselines: &BaselineTable, config: &AnalysisConfig) -> Result<ComparisonReport> {
    run_analysis(Analysis::Profile, dataset, Some(baselines), config)
}

pub fn cmd_poi(dataset: &TrialDataset, baselines: &BaselineTable, config: &AnalysisConfig) -> Result<ComparisonReport> {
    run_analysis(Analysis::Poi, dataset, Some(baselines), config)
}

pub fn cmd_anova(dataset: &TrialDataset, config: &AnalysisConfig) -> Result<ComparisonReport> {
    run_analysis(Analysis::Anova, dataset, None, config)
}

/// Human-readable summary of a report.
pub fn render_text(report: &ComparisonReport) -> String {
    let md = &report.metadata;
    let mut s = String::new();
    let _ = write!(
        s,
        "{:?} report: {} implementation(s) x {} environment(s)",
        md.analysis,
        md.implementations.len(),
        md.environments.len()
    );
    if md.analysis != Analysis::Anova {
        let _ = write!(s, "; seed {}, {} resamples, {}% CI", md.seed, md.resamples, md.confidence * 100.0);
    }
    s.push('\n');
    if let Some(v) = &report.verdict {
        let status = match v.status {
            VerdictStatus::Interchangeable => "INTERCHANGEABLE",
            VerdictStatus::NotInterchangeable => "NOT INTERCHANGEABLE",
        };
        let _ = writeln!(s, "\nverdict: {status}");
        for p in &v.better_pairs {
            let _ = writeln!(s, "  {} is better than {}", p.x, p.y);
        }
        if !v.rejecting_environments.is_empty() {
            let _ = writeln!(s, "  ANOVA rejects equal means on: {}", v.rejecting_environments.join(", "));
        }
    }
    if let Some(profile) = &report.profile {
        let _ = writeln!(s, "\nperformance profile (fraction of trials with score > tau):");
        let tau = profile.tau_grid.iter().position(|&t| t == 1.0).unwrap_or(0);
        for c in &profile.curves {
            let p = &c.points[tau];
            let _ = writeln!(
                s,
                "  {:<24} tau={:<6} {:.3} [{:.3}, {:.3}]",
                c.implementation, p.tau, p.estimate.point, p.estimate.ci_lower, p.estimate.ci_upper
            );
        }
    }
    if let Some(poi) = &report.poi {
        let _ = writeln!(s, "\nprobability of improvement P(X > Y):");
        for p in poi {
            let flags = [("significant", p.significant), ("meaningful", p.meaningful), ("BETTER", p.better)]
                .iter()
                .filter(|(_, on)| *on)
                .map(|(name, _)| format!(" {name}"))
                .collect::<String>();
            let _ = writeln!(
                s,
                "  {:<16} > {:<16} {:.3} [{:.3}, {:.3}]{}",
                p.x_implementation, p.y_implementation, p.estimate.point, p.estimate.ci_lower, p.estimate.ci_upper, flags
            );
        }
    }
    if let Some(anova) = &report.anova {
        let _ = writeln!(s, "\none-way ANOVA on MeanReward100 (alpha {}):", md.alpha);
        for a in anova {
            let _ = writeln!(
                s,
                "  {:<24} F({}, {}) = {:<10.4} p = {:.4e}{}",
                a.environment,
                a.df_between,
                a.df_within,
                a.f_statistic,
                a.p_value,
                if a.reject { "  reject" } else { "" }
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Execution;
    use crate::hypothesis::PoiResult;
    use crate::bootstrap::EstimateWithCI;
    use crate::normalization::BaselineEntry;
    use crate::trial_data::TrialRecord;

    fn est(point: f64, lo: f64, hi: f64) -> EstimateWithCI {
        EstimateWithCI { point, ci_lower: lo, ci_upper: hi, confidence: 0.95, resamples: 10 }
    }

    fn anova(env: &str, reject: bool) -> AnovaResult {
        AnovaResult {
            environment: env.into(),
            implementations: vec![],
            f_statistic: 1.0,
            df_between: 1,
            df_within: 2,
            p_value: if reject { 0.01 } else { 0.5 },
            reject,
        }
    }

    #[test]
    fn verdict_logic() {
        let calm = PoiResult::new("a", "b", est(0.55, 0.4, 0.7), 0.75);
        let strong = PoiResult::new("a", "b", est(0.9, 0.8, 0.95), 0.75);
        let v = Verdict::from_results(&[anova("E", false)], std::slice::from_ref(&calm));
        assert_eq!(v.status, VerdictStatus::Interchangeable);
        let v = Verdict::from_results(&[anova("E", true)], &[calm]);
        assert_eq!(v.status, VerdictStatus::NotInterchangeable);
        assert_eq!(v.rejecting_environments, ["E"]);
        let v = Verdict::from_results(&[anova("E", false)], &[strong]);
        assert_eq!(v.better_pairs, [BetterPair { x: "a".into(), y: "b".into() }]);
    }

    fn small_dataset() -> (TrialDataset, BaselineTable) {
        let mut records = Vec::new();
        for env in ["E1", "E2"] {
            for imp in ["A", "B"] {
                for t in 0..3u32 {
                    records.push(TrialRecord::aggregated(imp, env, t, f64::from(t) + if imp == "A" { 0.0 } else { 0.5 }));
                }
            }
        }
        let mut table = BaselineTable::default();
        table.insert(BaselineEntry::new("E1", 0.0, 2.0)).unwrap();
        table.insert(BaselineEntry::new("E2", 0.0, 1.0)).unwrap();
        (TrialDataset::new(records).unwrap(), table)
    }

    fn cfg() -> AnalysisConfig {
        AnalysisConfig { resamples: 200, execution: Execution::Sequential, ..Default::default() }
    }

    #[test]
    fn partial_reports_only_carry_their_section() {
        let (ds, table) = small_dataset();
        let r = cmd_anova(&ds, &cfg()).unwrap();
        assert!(r.anova.is_some() && r.profile.is_none() && r.poi.is_none() && r.verdict.is_none());
        let r = cmd_profile(&ds, &table, &cfg()).unwrap();
        assert!(r.profile.is_some() && r.anova.is_none());
        let r = cmd_poi(&ds, &table, &cfg()).unwrap();
        assert_eq!(r.poi.as_ref().unwrap().len(), 2);
        let r = cmd_compare(&ds, &table, &cfg()).unwrap();
        assert!(r.verdict.is_some());
        assert_eq!(ComparisonReport::from_json(&r.to_json().unwrap()).unwrap(), r);
        assert!(render_text(&r).contains("verdict"));
    }

    #[test]
    fn single_implementation_rejected_for_comparisons() {
        let (ds, table) = small_dataset();
        let config = AnalysisConfig { implementations: Some(vec!["A".into()]), ..cfg() };
        let err = cmd_compare(&ds, &table, &config).unwrap_err();
        assert!(err.to_string().contains("need >= 2 implementations"), "{err}");
        assert!(cmd_profile(&ds, &table, &config).is_ok());
    }

    #[test]
    fn mean_reward_rows_summarise_cells() {
        let (ds, _) = small_dataset();
        let rows = mean_reward_rows(&ds);
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[1].implementation.as_str(), rows[1].mean, rows[1].min, rows[1].max), ("B", 1.5, 0.5, 2.5));
    }

    #[test]
    fn degenerate_baselines_are_listed() {
        let (ds, _) = small_dataset();
        let mut table = BaselineTable::default();
        table.insert(BaselineEntry::new("E1", 1.0, 1.0)).unwrap();
        table.insert(BaselineEntry::new("E2", 3.0, 3.0)).unwrap();
        let err = cmd_compare(&ds, &table, &cfg()).unwrap_err().to_string();
        assert!(err.contains("E1") && err.contains("E2"), "{err}");
    }
}
