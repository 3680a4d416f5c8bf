use serde::{Deserialize, Serialize};

use crate::bootstrap::{default_tau_grid, BootstrapConfig, DEFAULT_CONFIDENCE, DEFAULT_RESAMPLES};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hypothesis::{VerdictThresholds, DEFAULT_ALPHA, DEFAULT_MEANINGFUL_THRESHOLD};

/// Fully resolved analysis settings. Everything except `execution` is echoed
/// into report metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
    pub tau_grid: Vec<f64>,
    pub alpha: f64,
    pub meaningful_threshold: f64,
    /// Restrict the analysis to these implementations; `None` means all.
    pub implementations: Option<Vec<String>>,
    pub execution: Execution,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            resamples: DEFAULT_RESAMPLES,
            confidence: DEFAULT_CONFIDENCE,
            seed: 0,
            tau_grid: default_tau_grid(),
            alpha: DEFAULT_ALPHA,
            meaningful_threshold: DEFAULT_MEANINGFUL_THRESHOLD,
            implementations: None,
            execution: Execution::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn bootstrap(&self) -> BootstrapConfig {
        BootstrapConfig {
            resamples: self.resamples,
            confidence: self.confidence,
            seed: self.seed,
            execution: self.execution,
        }
    }

    pub fn thresholds(&self) -> VerdictThresholds {
        VerdictThresholds {
            alpha: self.alpha,
            meaningful: self.meaningful_threshold,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bootstrap().validate()?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.meaningful_threshold) {
            return Err(Error::InvalidArgument(format!(
                "meaningful threshold must lie in [0, 1], got {}",
                self.meaningful_threshold
            )));
        }
        Ok(())
    }
}

/// Optional settings from one source (config file or command line).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub resamples: Option<usize>,
    pub confidence: Option<f64>,
    pub seed: Option<u64>,
    pub tau_grid: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub meaningful_threshold: Option<f64>,
    pub implementations: Option<Vec<String>>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config file: {}", e.to_string().trim_end())))
    }

    /// Applies the set fields on top of `base`.
    pub fn apply(&self, mut base: AnalysisConfig) -> AnalysisConfig {
        if let Some(v) = self.resamples {
            base.resamples = v;
        }
        if let Some(v) = self.confidence {
            base.confidence = v;
        }
        if let Some(v) = self.seed {
            base.seed = v;
        }
        if let Some(v) = &self.tau_grid {
            base.tau_grid = v.clone();
        }
        if let Some(v) = self.alpha {
            base.alpha = v;
        }
        if let Some(v) = self.meaningful_threshold {
            base.meaningful_threshold = v;
        }
        if let Some(v) = &self.implementations {
            base.implementations = Some(v.clone());
        }
        base
    }
}

/// Resolves command-line flags over a config file over defaults.
pub fn resolve_config(file: Option<&ConfigOverrides>, flags: &ConfigOverrides) -> Result<AnalysisConfig> {
    let mut config = AnalysisConfig::default();
    if let Some(file) = file {
        config = file.apply(config);
    }
    config = flags.apply(config);
    config.validate()?;
    Ok(config)
}

/// Parses a τ grid: either a comma list (`0,0.5,1`) or `start:stop:step`
/// (inclusive of `stop` up to rounding).
pub fn parse_tau_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("invalid tau grid {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            if count > 1_000_000 {
                return Err(bad());
            }
            Ok((0..=count).map(|i| start + i as f64 * step).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let file = ConfigOverrides::from_toml("resamples = 500\nseed = 9\nalpha = 0.01\n").unwrap();
        let flags = ConfigOverrides { seed: Some(3), ..Default::default() };
        let c = resolve_config(Some(&file), &flags).unwrap();
        assert_eq!((c.resamples, c.seed, c.alpha), (500, 3, 0.01));
        assert_eq!(c.confidence, 0.95);
        assert_eq!(c.meaningful_threshold, 0.75);
        assert_eq!(c.tau_grid.len(), 41);
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        assert!(ConfigOverrides::from_toml("resampels = 3\n").is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let flags = ConfigOverrides { confidence: Some(1.5), ..Default::default() };
        assert!(resolve_config(None, &flags).is_err());
        let flags = ConfigOverrides { alpha: Some(0.0), ..Default::default() };
        assert!(resolve_config(None, &flags).is_err());
    }

    #[test]
    fn tau_grids() {
        assert_eq!(parse_tau_grid("1.0").unwrap(), [1.0]);
        assert_eq!(parse_tau_grid("0, 0.5,2").unwrap(), [0.0, 0.5, 2.0]);
        assert_eq!(parse_tau_grid("0:1:0.25").unwrap(), [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_tau_grid("0:2:0.05").unwrap().len(), 41);
        for bad in ["", "a", "0:1", "1:0:0.1", "0:1:0", "0:1:-1", "nan"] {
            assert!(parse_tau_grid(bad).is_err(), "{bad}");
        }
    }
}
