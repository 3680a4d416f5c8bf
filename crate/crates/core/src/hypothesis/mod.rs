//! Pairwise probability of improvement and per-environment one-way ANOVA.

mod anova;
mod poi;

pub use anova::{anova_by_environment, anova_oneway, AnovaResult};
pub use poi::{poi_env, poi_matrix, poi_overall, poi_with_ci, PoiResult};

use serde::{Deserialize, Serialize};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_MEANINGFUL_THRESHOLD: f64 = 0.75;

/// Decision thresholds for ANOVA rejection and POI meaningfulness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictThresholds {
    /// ANOVA rejects equal means when p < alpha.
    pub alpha: f64,
    /// A POI is meaningful when its CI upper bound exceeds this.
    pub meaningful: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            alpha: DEFAULT_ALPHA,
            meaningful: DEFAULT_MEANINGFUL_THRESHOLD,
        }
    }
}
