//! End-to-end consistency runs: fit growing samples from a known density
//! and report how the estimate tracks it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::tree::FittedTree;

use super::dist::TestDistribution;

/// What one fitted sample size produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub n: usize,
    pub ln_evidence: f64,
    pub node_count: u64,
    /// Mean |ln(estimate / truth)| over the comparison grid.
    pub mean_abs_log_density_error: f64,
    pub expected_dimension: f64,
    pub average_height: f64,
}

/// A full run over nested samples from one target distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub distribution: String,
    pub seed: u64,
    pub grid: usize,
    pub sizes: Vec<SizeReport>,
}

/// Draws one stream from `dist` and fits each requested prefix size, so the
/// samples are nested and sizes are directly comparable. Deterministic in
/// `seed`.
///
/// The density error is averaged over grid midpoints restricted to
/// [0.01, 0.99] with strictly positive target density: zero-density cells
/// would make the log ratio infinite, and the singular target's pole sits
/// at the boundary where no finite sample can follow it.
pub fn consistency_experiment(
    dist: TestDistribution,
    sizes: &[usize],
    grid: usize,
    seed: u64,
    config: &ModelConfig,
) -> Result<ExperimentReport> {
    if grid < 10 {
        return Err(Error::InvalidArgument(format!(
            "comparison grid of {grid} points is too coarse"
        )));
    }
    let max_n = sizes.iter().copied().max().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<f64> = (0..max_n)
        .map(|_| dist.inverse_cdf(rng.gen::<f64>()))
        .collect();

    let mut reports = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let tree = FittedTree::fit(&draws[..n], config.clone())?;
        let error = mean_abs_log_density_error(&tree, dist, grid)?;
        let s = tree.summary();
        reports.push(SizeReport {
            n,
            ln_evidence: s.log_evidence,
            node_count: s.node_count,
            mean_abs_log_density_error: error,
            expected_dimension: s.dims.expected_dimension(),
            average_height: s.avg_height,
        });
    }
    Ok(ExperimentReport {
        distribution: dist.name().to_string(),
        seed,
        grid,
        sizes: reports,
    })
}

fn mean_abs_log_density_error(
    tree: &FittedTree,
    dist: TestDistribution,
    grid: usize,
) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0u64;
    for i in 0..grid {
        let x = (i as f64 + 0.5) / grid as f64;
        if !(0.01..=0.99).contains(&x) {
            continue;
        }
        let truth = dist.pdf(x);
        if truth <= 0.0 {
            continue;
        }
        total += (tree.added_log_evidence(x)? - truth.ln()).abs();
        count += 1;
    }
    debug_assert!(count > 0);
    Ok(total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_are_deterministic_in_the_seed() {
        let config = ModelConfig::default();
        let a = consistency_experiment(TestDistribution::Linear, &[50, 200], 100, 5, &config)
            .unwrap();
        let b = consistency_experiment(TestDistribution::Linear, &[50, 200], 100, 5, &config)
            .unwrap();
        assert_eq!(a, b);
        let c = consistency_experiment(TestDistribution::Linear, &[50, 200], 100, 6, &config)
            .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn more_data_tracks_the_linear_density_better() {
        let config = ModelConfig::default();
        let report =
            consistency_experiment(TestDistribution::Linear, &[30, 3000], 200, 11, &config)
                .unwrap();
        assert_eq!(report.sizes.len(), 2);
        let small = &report.sizes[0];
        let large = &report.sizes[1];
        assert!(
            large.mean_abs_log_density_error < small.mean_abs_log_density_error,
            "{} vs {}",
            large.mean_abs_log_density_error,
            small.mean_abs_log_density_error
        );
        assert!(large.node_count > small.node_count);
        assert!(large.ln_evidence > small.ln_evidence);
    }

    #[test]
    fn the_step_target_pins_dimension_near_one() {
        // The step density is one split of the unit interval; with plenty
        // of data the posterior should expect roughly one effective split
        // on the grid scale and place high mass on splitting at the root.
        let config = ModelConfig::default();
        let report = consistency_experiment(TestDistribution::Step, &[5000], 100, 3, &config)
            .unwrap();
        let fitted = &report.sizes[0];
        assert!(
            fitted.mean_abs_log_density_error < 0.2,
            "error {}",
            fitted.mean_abs_log_density_error
        );
        assert!(fitted.expected_dimension >= 1.0);
    }

    #[test]
    fn a_too_coarse_grid_is_rejected() {
        let config = ModelConfig::default();
        assert!(matches!(
            consistency_experiment(TestDistribution::Beta, &[10], 5, 1, &config),
            Err(Error::InvalidArgument(_))
        ));
    }
}
