use serde::{Deserialize, Serialize};

use super::coeffs::coeffs_unchecked;

/// Left/right occupancy of a cell's bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub n_left: u64,
    pub n_right: u64,
}

impl SplitCounts {
    pub fn new(n_left: u64, n_right: u64) -> Self {
        SplitCounts { n_left, n_right }
    }

    pub fn total(&self) -> u64 {
        self.n_left + self.n_right
    }

    /// n_left / n - 1/2, in [-1/2, 1/2]. None for an empty cell.
    pub fn balance(&self) -> Option<f64> {
        let n = self.total();
        if n == 0 {
            None
        } else {
            Some(self.n_left as f64 / n as f64 - 0.5)
        }
    }
}

/// Where the query point sits relative to the current cell, expressed in the
/// cell's own coordinates (the cell rescaled to [0, 1)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueryPosition {
    /// Inside the cell, at the given rescaled position in [0, 1).
    Inside(f64),
    /// A query point exists but lies outside this cell.
    Outside,
    /// No query point at all.
    Absent,
}

impl QueryPosition {
    pub fn is_inside(&self) -> bool {
        matches!(self, QueryPosition::Inside(_))
    }

    /// Positions relative to the two half-width children. A point at
    /// exactly 1/2 belongs to the right child.
    pub(crate) fn descend(self) -> (QueryPosition, QueryPosition) {
        match self {
            QueryPosition::Inside(r) if r < 0.5 => {
                (QueryPosition::Inside(2.0 * r), QueryPosition::Outside)
            }
            QueryPosition::Inside(r) => {
                (QueryPosition::Outside, QueryPosition::Inside(2.0 * r - 1.0))
            }
            QueryPosition::Outside => (QueryPosition::Outside, QueryPosition::Outside),
            QueryPosition::Absent => (QueryPosition::Absent, QueryPosition::Absent),
        }
    }
}

/// Posterior over the number of splits a cell's subtree effectively uses.
/// `probs[k]` is the probability of exactly k splits; mass beyond the
/// truncation length sits in `tail_mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionDistribution {
    pub probs: Vec<f64>,
    pub tail_mass: f64,
}

impl DimensionDistribution {
    /// Distribution of an empty or singleton cell under the infinite prior.
    pub(crate) fn prior(n_terms: usize, split_prior: f64) -> Self {
        let probs = coeffs_unchecked(n_terms, split_prior);
        DimensionDistribution::from_probs(probs)
    }

    /// All mass on "zero splits", the distribution of a depth-capped leaf.
    pub fn point_mass_at_zero(n_terms: usize) -> Self {
        let mut probs = vec![0.0; n_terms];
        probs[0] = 1.0;
        DimensionDistribution {
            probs,
            tail_mass: 0.0,
        }
    }

    pub(crate) fn from_probs(probs: Vec<f64>) -> Self {
        let sum: f64 = probs.iter().sum();
        // Clamp away the few ulps the subtraction can go negative by.
        let tail_mass = (1.0 - sum).max(0.0);
        DimensionDistribution { probs, tail_mass }
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum::<f64>() + self.tail_mass
    }

    /// Mean number of splits, counting tail mass at the truncation point.
    /// A lower bound on the true mean whenever tail_mass > 0.
    pub fn expected_dimension(&self) -> f64 {
        let mean: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum();
        mean + self.tail_mass * self.probs.len() as f64
    }
}

/// Everything the recursion reports about one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSummary {
    /// ln p(D_z): log marginal likelihood of the cell's data, rescaled to
    /// the cell. Never below ln(1 - split_prior) and exactly 0 for n <= 1.
    pub log_evidence: f64,
    /// Posterior probability that the cell splits, in [0, 1).
    pub split_posterior: f64,
    /// Expected tree height threaded through the query point; 0 when the
    /// query is outside the cell or absent.
    pub height_at_query: f64,
    /// Expected tree height at a fresh point drawn from the cell's
    /// posterior predictive.
    pub avg_height: f64,
    pub dims: DimensionDistribution,
    /// Number of nodes the evaluation recursion visited for this cell.
    pub node_count: u64,
}
