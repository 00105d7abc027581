//! The two building blocks of the evaluation recursion: closed-form leaves
//! for cells holding at most one point, and the combine step that folds two
//! child summaries into their parent.

use super::config::ModelConfig;
use super::summary::{DimensionDistribution, NodeSummary, QueryPosition, SplitCounts};
use super::weight::log_weight;

/// Closed forms of the infinite recursion over a cell with n <= 1 points.
/// Its evidence is exactly 1 at every depth, so the whole subtree below the
/// separation level collapses into this one summary with no approximation.
pub fn leaf_summary(n: u64, query: QueryPosition, config: &ModelConfig) -> NodeSummary {
    debug_assert!(n <= 1, "closed-form leaf applies to n <= 1, got {n}");
    let height = config.leaf_height();
    NodeSummary {
        log_evidence: 0.0,
        split_posterior: config.split_prior,
        height_at_query: if query.is_inside() { height } else { 0.0 },
        avg_height: height,
        dims: DimensionDistribution::prior(config.dim_trunc, config.split_prior),
        node_count: 1,
    }
}

/// Summary of a cell closed at `max_depth`: the model is truncated there,
/// the cell is uniform whatever it holds.
pub(crate) fn depth_capped_summary(config: &ModelConfig) -> NodeSummary {
    NodeSummary {
        log_evidence: 0.0,
        split_posterior: 0.0,
        height_at_query: 0.0,
        avg_height: 0.0,
        dims: DimensionDistribution::point_mass_at_zero(config.dim_trunc),
        node_count: 1,
    }
}

/// Log evidence of a parent from its children's log evidences:
/// p = (1 - b) + b * p_left * p_right / w(counts).
pub(crate) fn combine_log_evidence(
    lp_left: f64,
    lp_right: f64,
    counts: SplitCounts,
    config: &ModelConfig,
) -> f64 {
    let b = config.split_prior;
    let t = lp_left + lp_right - log_weight(counts);
    let shifted = t + (b / (1.0 - b)).ln();
    if shifted < config.overflow_threshold {
        (1.0 - b).ln() + shifted.exp().ln_1p()
    } else {
        // The uniform branch is negligible at this magnitude.
        t + b.ln()
    }
}

pub(crate) fn split_posterior_from(log_evidence: f64, config: &ModelConfig) -> f64 {
    // log_evidence >= ln(1 - b), so this sits in [0, 1); clamp the ulp of
    // rounding slack at the lower end.
    (1.0 - (1.0 - config.split_prior) * (-log_evidence).exp()).max(0.0)
}

/// Folds two child summaries into the parent cell's summary.
///
/// `query` is the position relative to the parent cell; the children must
/// have been evaluated at the matching descended positions. Runs in
/// O(dim_trunc^2) for the dimension convolution.
pub fn combine(
    left: &NodeSummary,
    right: &NodeSummary,
    counts: SplitCounts,
    query: QueryPosition,
    config: &ModelConfig,
) -> NodeSummary {
    let log_evidence = combine_log_evidence(left.log_evidence, right.log_evidence, counts, config);
    let g = split_posterior_from(log_evidence, config);

    let height_at_query = if query.is_inside() {
        g * (1.0 + left.height_at_query + right.height_at_query)
    } else {
        0.0
    };

    let n = counts.total() as f64;
    let share_left = (counts.n_left as f64 + 1.0) / (n + 2.0);
    let share_right = (counts.n_right as f64 + 1.0) / (n + 2.0);
    let avg_height = g * (1.0 + share_left * left.avg_height + share_right * right.avg_height);

    let n_terms = config.dim_trunc;
    let mut probs = Vec::with_capacity(n_terms);
    probs.push(1.0 - g);
    for k in 0..n_terms - 1 {
        let s: f64 = (0..=k)
            .map(|i| left.dims.probs[i] * right.dims.probs[k - i])
            .sum();
        probs.push(g * s);
    }

    NodeSummary {
        log_evidence,
        split_posterior: g,
        height_at_query,
        avg_height,
        dims: DimensionDistribution::from_probs(probs),
        node_count: 1 + left.node_count + right.node_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::coeffs::coeffs_unchecked;

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol,
            "got {got}, want {want} (diff {})",
            (got - want).abs()
        );
    }

    #[test]
    fn leaf_evidence_is_exactly_zero() {
        let config = ModelConfig::default();
        for n in [0, 1] {
            let s = leaf_summary(n, QueryPosition::Absent, &config);
            assert_eq!(s.log_evidence, 0.0);
            assert_eq!(s.split_posterior, 0.5);
            assert_eq!(s.node_count, 1);
        }
    }

    #[test]
    fn leaf_heights_are_the_fixed_points() {
        let config = ModelConfig::default();
        let s = leaf_summary(0, QueryPosition::Inside(0.3), &config);
        assert_eq!(s.height_at_query, 1.0);
        assert_eq!(s.avg_height, 1.0);
        let out = leaf_summary(0, QueryPosition::Outside, &config);
        assert_eq!(out.height_at_query, 0.0);
        assert_eq!(out.avg_height, 1.0);

        let quarter = ModelConfig {
            split_prior: 0.25,
            ..ModelConfig::default()
        };
        let s = leaf_summary(1, QueryPosition::Inside(0.0), &quarter);
        assert_close(s.height_at_query, 1.0 / 3.0, 1e-15);
        assert_close(s.avg_height, 1.0 / 3.0, 1e-15);
    }

    #[test]
    fn leaf_dims_are_the_prior_coefficients() {
        let config = ModelConfig::default();
        let s = leaf_summary(0, QueryPosition::Absent, &config);
        assert_eq!(s.dims.probs, coeffs_unchecked(16, 0.5));
    }

    #[test]
    fn combining_two_empty_leaves_is_a_no_op_on_evidence() {
        // p = (1-b) + b * 1 * 1 / w(0,0) = 1 for every admissible b.
        let config = ModelConfig::default();
        let leaf = leaf_summary(0, QueryPosition::Absent, &config);
        let parent = combine(
            &leaf,
            &leaf,
            SplitCounts::new(0, 0),
            QueryPosition::Absent,
            &config,
        );
        assert_eq!(parent.log_evidence, 0.0);
        assert_eq!(parent.split_posterior, 0.5);
        assert_eq!(parent.avg_height, 1.0);
        assert_eq!(parent.dims.probs, leaf.dims.probs);
        assert_eq!(parent.node_count, 3);
    }

    #[test]
    fn two_separated_points_give_five_sixths() {
        // Singleton halves: p = 1/2 (1 + 1 / w(1,1)) = 1/2 (1 + 2/3) = 5/6.
        let config = ModelConfig::default();
        let l = leaf_summary(1, QueryPosition::Outside, &config);
        let r = leaf_summary(1, QueryPosition::Outside, &config);
        let parent = combine(
            &l,
            &r,
            SplitCounts::new(1, 1),
            QueryPosition::Absent,
            &config,
        );
        assert_close(parent.log_evidence, (5.0f64 / 6.0).ln(), 1e-15);
        assert_close(parent.split_posterior, 0.4, 1e-15);
        assert_close(parent.dims.probs[0], 0.6, 1e-15);
        assert_close(parent.dims.probs[1], 0.1, 1e-15);
        assert_close(parent.dims.probs[2], 0.05, 1e-15);
    }

    #[test]
    fn overflow_branch_matches_the_exact_one_at_the_threshold() {
        let config = ModelConfig::default();
        // Push t just below and just above the cutoff; the two branches must
        // agree to the accuracy of the dropped (1-b) term, e^-t.
        let tight = ModelConfig {
            overflow_threshold: 1.0,
            ..config.clone()
        };
        let counts = SplitCounts::new(1, 1);
        let lp = 30.0;
        let exact = combine_log_evidence(lp, 0.0, counts, &config);
        let asym = combine_log_evidence(lp, 0.0, counts, &tight);
        assert_close(exact, asym, 1e-12);
    }

    #[test]
    fn evidence_never_falls_below_the_uniform_floor() {
        let config = ModelConfig::default();
        // Wildly unbalanced counts make the split branch tiny.
        let lp = combine_log_evidence(0.0, 0.0, SplitCounts::new(40, 0), &config);
        assert!(lp >= (0.5f64).ln());
        let g = split_posterior_from(lp, &config);
        assert!((0.0..1.0).contains(&g));
    }

    #[test]
    fn depth_capped_cell_reports_no_structure() {
        let config = ModelConfig::default();
        let s = depth_capped_summary(&config);
        assert_eq!(s.log_evidence, 0.0);
        assert_eq!(s.split_posterior, 0.0);
        assert_eq!(s.avg_height, 0.0);
        assert_eq!(s.dims.probs[0], 1.0);
        assert_eq!(s.dims.tail_mass, 0.0);
    }
}
