//! Statistical differential testing for stochastic implementations.
//!
//! Given per-episode reward logs from several implementations of the same
//! algorithm, this crate decides whether they perform interchangeably:
//!
//! 1. [`trial_data`] parses logs and summarises each trial by the mean reward
//!    of its last 100 episodes.
//! 2. [`normalization`] maps those means to human-normalized scores.
//! 3. [`bootstrap`] computes stratified bootstrap confidence intervals and
//!    performance profiles.
//! 4. [`hypothesis`] computes pairwise probability of improvement with
//!    significance/meaningfulness verdicts, and per-environment one-way ANOVA.
//! 5. [`report`] runs the whole pipeline and emits reports and plot tables.
//!
//! [`synthetic`] generates trial logs from known reward models so that every
//! statistic can be checked against a closed form.

pub mod bootstrap;
pub mod error;
pub mod exec;
pub mod hypothesis;
pub mod matrix;
pub mod normalization;
pub mod report;
pub mod rng;
pub mod special;
pub mod synthetic;
pub mod trial_data;

pub use bootstrap::{
    aggregate, performance_profile, sbci, stratified_resample, AggregationMetric, BootstrapConfig,
    EstimateWithCI, PerformanceProfile,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use hypothesis::{anova_oneway, poi_env, poi_overall, poi_with_ci, AnovaResult, PoiResult, VerdictThresholds};
pub use matrix::ScoreMatrix;
pub use normalization::{load_baseline_table, normalize_score, BaselineEntry, BaselineTable, NormalizedScore};
pub use special::f_distribution_sf;
pub use trial_data::{
    build_score_matrix, mean_reward_100, parse_trial_log, write_trial_log, MeanReward100, TrialDataset,
    TrialRecord,
};
