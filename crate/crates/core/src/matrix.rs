use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-trial scores indexed by (environment stratum, implementation).
///
/// Each cell holds one value per trial, ordered by trial index. Cells may be
/// empty when an implementation was not run on an environment; operations
/// that need the implementation in every stratum check for that.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    strata: Vec<String>,
    implementations: Vec<String>,
    cells: Vec<Vec<Vec<f64>>>,
}

/// Trial count of one (environment, implementation) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCount {
    pub environment: String,
    pub implementation: String,
    pub trials: usize,
}

impl ScoreMatrix {
    /// `cells[m][k]` holds the scores of implementation `k` on stratum `m`.
    pub fn new(
        strata: Vec<String>,
        implementations: Vec<String>,
        cells: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if strata.is_empty() {
            return Err(Error::InvalidArgument("score matrix needs >= 1 stratum".into()));
        }
        if cells.len() != strata.len() || cells.iter().any(|row| row.len() != implementations.len()) {
            return Err(Error::InvalidArgument("cell grid does not match labels".into()));
        }
        if cells.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite score".into()));
        }
        Ok(ScoreMatrix {
            strata,
            implementations,
            cells,
        })
    }

    pub fn strata(&self) -> &[String] {
        &self.strata
    }

    pub fn implementations(&self) -> &[String] {
        &self.implementations
    }

    pub fn cell(&self, stratum: usize, implementation: usize) -> &[f64] {
        &self.cells[stratum][implementation]
    }

    pub fn stratum_index(&self, name: &str) -> Option<usize> {
        self.strata.iter().position(|s| s == name)
    }

    pub fn implementation_index(&self, name: &str) -> Option<usize> {
        self.implementations.iter().position(|s| s == name)
    }

    pub fn counts(&self) -> Vec<CellCount> {
        self.strata
            .iter()
            .enumerate()
            .flat_map(|(m, env)| {
                self.implementations.iter().enumerate().map(move |(k, imp)| CellCount {
                    environment: env.clone(),
                    implementation: imp.clone(),
                    trials: self.cells[m][k].len(),
                })
            })
            .collect()
    }

    /// Per-stratum cells of `implementation`, failing if any stratum is empty.
    pub fn complete_cells(&self, implementation: &str) -> Result<Vec<&[f64]>> {
        let k = self
            .implementation_index(implementation)
            .ok_or_else(|| Error::UnknownImplementation(implementation.to_owned()))?;
        self.cells
            .iter()
            .zip(&self.strata)
            .map(|(row, env)| {
                if row[k].is_empty() {
                    Err(Error::MissingCell {
                        implementation: implementation.to_owned(),
                        environment: env.clone(),
                    })
                } else {
                    Ok(row[k].as_slice())
                }
            })
            .collect()
    }

    /// All scores of `implementation`, pooled across strata.
    pub fn pooled(&self, implementation: usize) -> Vec<f64> {
        self.cells.iter().flat_map(|row| row[implementation].iter().copied()).collect()
    }

    pub fn min_score(&self) -> Option<f64> {
        self.cells.iter().flatten().flatten().copied().reduce(f64::min)
    }
}
