use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Handling of data points that still share a cell at `max_depth`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuplicatePolicy {
    /// Close the cell with a fixed-depth leaf: evidence 1, heights 0, all
    /// dimension mass on "no further splits".
    Truncate,
    /// Refuse the dataset instead.
    Error,
}

/// Model and evaluation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Prior probability that a cell splits rather than stays uniform.
    /// Must lie in (0, 1/2]: past 1/2 the split cascade survives forever
    /// with positive probability and the dimension distribution loses mass
    /// to infinite trees.
    pub split_prior: f64,
    /// Number of entries kept in dimension distributions; the mass beyond
    /// is reported explicitly as `tail_mass`.
    pub dim_trunc: usize,
    /// Deepest cell level. A cell at depth d has width 2^-d; past 52 levels
    /// double-precision data cannot justify further structure.
    pub max_depth: u32,
    /// Exponent cutoff in the combine step: once the shifted log evidence
    /// ratio exceeds this, the mixture collapses to its dominant branch.
    pub overflow_threshold: f64,
    pub duplicate_policy: DuplicatePolicy,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            split_prior: 0.5,
            dim_trunc: 16,
            max_depth: 52,
            overflow_threshold: 100.0,
            duplicate_policy: DuplicatePolicy::Truncate,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split_prior > 0.0 && self.split_prior <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "split_prior must lie in (0, 1/2], got {}",
                self.split_prior
            )));
        }
        if self.dim_trunc == 0 {
            return Err(Error::InvalidConfig("dim_trunc must be positive".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidConfig("max_depth must be positive".into()));
        }
        if !(self.overflow_threshold > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "overflow_threshold must be positive, got {}",
                self.overflow_threshold
            )));
        }
        Ok(())
    }

    /// Expected height of the infinite tree over an empty or singleton cell,
    /// the fixed point of h = split_prior * (1 + h).
    pub fn leaf_height(&self) -> f64 {
        self.split_prior / (1.0 - self.split_prior)
    }
}
