//! End-to-end pipeline, comparison reports and plot-ready tables.

mod compare;
mod config;
mod plot;

pub use compare::{
    cmd_anova, cmd_compare, cmd_poi, cmd_profile, render_text, run_analysis, Analysis, BetterPair,
    ComparisonReport, MeanRewardRow, ReportMetadata, Verdict, VerdictStatus, REPORT_SCHEMA_VERSION,
};
pub use config::{parse_tau_grid, resolve_config, AnalysisConfig, ConfigOverrides};
pub use plot::{curve_table, poi_table, profile_table, write_plot_data, CurveRow};
