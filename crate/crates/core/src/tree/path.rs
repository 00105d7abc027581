//! Point queries that walk one root-to-leaf path of a fitted tree.
//!
//! Every stored summary outside the query's path is reused as-is, so these
//! run in O(depth) regardless of data size. Below a stored leaf the walk
//! continues virtually through the closed-form subtree: an empty cell emits
//! uniformly, and a cell holding one point splits with posterior equal to
//! the split prior, sending the next point to the occupied half with
//! probability 2/3 under the centered occupancy rule.

use crate::error::{Error, Result};
use crate::model::{combine_log_evidence, DuplicatePolicy, ModelConfig, SplitCounts};

use super::{normalize, replay_residual, FittedTree, NodeKind, TreeNode};

const OCCUPIED_SHARE: f64 = 2.0 / 3.0;
const EMPTY_SHARE: f64 = 1.0 / 3.0;

impl FittedTree {
    /// ln p(data with `x` added) - ln p(data): the log predictive density
    /// of the next point falling at `x`. Agrees bit for bit with refitting
    /// on the enlarged data set.
    pub fn added_log_evidence(&self, x: f64) -> Result<f64> {
        let mut visited = 0;
        self.added_log_evidence_counted(x, &mut visited)
    }

    /// Posterior predictive density at `x`.
    pub fn predictive_density(&self, x: f64) -> Result<f64> {
        Ok(self.added_log_evidence(x)?.exp())
    }

    /// [`predictive_density`](Self::predictive_density) plus the number of
    /// nodes the walk touched, stored and virtual. Diagnostic: the count is
    /// bounded by the depth cap plus the query path length, independent of
    /// data size.
    pub fn predictive_density_traced(&self, x: f64) -> Result<(f64, usize)> {
        let mut visited = 0;
        let lp = self.added_log_evidence_counted(x, &mut visited)?;
        Ok((lp.exp(), visited))
    }

    /// P(next point < `x`). Accepts `x` in [0, 1]; the endpoints map to
    /// exactly 0 and 1.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let mut visited = 0;
        self.cdf_counted(x, &mut visited)
    }

    /// [`cdf`](Self::cdf) plus the number of nodes the walk touched.
    pub fn cdf_traced(&self, x: f64) -> Result<(f64, usize)> {
        let mut visited = 0;
        let c = self.cdf_counted(x, &mut visited)?;
        Ok((c, visited))
    }

    /// Expected tree height threaded through `x`: the mean number of splits
    /// the posterior uses to resolve the cell around `x`.
    pub fn height_at(&self, x: f64) -> Result<f64> {
        let x = check_unit_point(x)?;
        Ok(height_cell(&self.root, x, &self.config))
    }

    fn added_log_evidence_counted(&self, x: f64, visited: &mut usize) -> Result<f64> {
        let x = check_unit_point(x)?;
        let new_lp = new_log_evidence(&self.root, x, &self.config, visited)?;
        Ok(new_lp - self.root.summary.log_evidence)
    }

    fn cdf_counted(&self, x: f64, visited: &mut usize) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!(
                "cdf argument {x} is outside [0, 1]"
            )));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == 1.0 {
            return Ok(1.0);
        }
        let c = cdf_cell(&self.root, x, &self.config, visited)?;
        Ok(c.clamp(0.0, 1.0))
    }
}

fn check_unit_point(x: f64) -> Result<f64> {
    let x = normalize(x);
    if (0.0..1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::InvalidArgument(format!(
            "query point {x} is outside [0, 1)"
        )))
    }
}

/// Log evidence of the subtree after adding a point at residual `r`,
/// reusing the stored sibling summaries off the path.
fn new_log_evidence(
    node: &TreeNode,
    r: f64,
    config: &ModelConfig,
    visited: &mut usize,
) -> Result<f64> {
    *visited += 1;
    match &node.kind {
        // One point in a cell has evidence exactly 1.
        NodeKind::Leaf(None) => Ok(0.0),
        NodeKind::Leaf(Some(y)) => {
            let s = replay_residual(*y, node.depth);
            pair_log_evidence(s, r, node.depth, config, visited)
        }
        // Capped cells only exist under the truncating policy; they stay
        // uniform whatever lands in them.
        NodeKind::Capped(_) => Ok(0.0),
        NodeKind::Split { left, right } => {
            if r < 0.5 {
                let lp = new_log_evidence(left, 2.0 * r, config, visited)?;
                let counts = SplitCounts::new(left.n + 1, right.n);
                Ok(combine_log_evidence(
                    lp,
                    right.summary.log_evidence,
                    counts,
                    config,
                ))
            } else {
                let lp = new_log_evidence(right, 2.0 * r - 1.0, config, visited)?;
                let counts = SplitCounts::new(left.n, right.n + 1);
                Ok(combine_log_evidence(
                    left.summary.log_evidence,
                    lp,
                    counts,
                    config,
                ))
            }
        }
    }
}

/// Log evidence of a cell at `depth` holding exactly the stored point
/// (residual `s`) and the new point (residual `r`).
fn pair_log_evidence(
    s: f64,
    r: f64,
    depth: u32,
    config: &ModelConfig,
    visited: &mut usize,
) -> Result<f64> {
    *visited += 1;
    if depth >= config.max_depth {
        return match config.duplicate_policy {
            DuplicatePolicy::Truncate => Ok(0.0),
            DuplicatePolicy::Error => Err(Error::DuplicateData { depth }),
        };
    }
    let s_left = s < 0.5;
    let r_left = r < 0.5;
    if s_left != r_left {
        return Ok(combine_log_evidence(
            0.0,
            0.0,
            SplitCounts::new(1, 1),
            config,
        ));
    }
    if s_left {
        let lp = pair_log_evidence(2.0 * s, 2.0 * r, depth + 1, config, visited)?;
        Ok(combine_log_evidence(
            lp,
            0.0,
            SplitCounts::new(2, 0),
            config,
        ))
    } else {
        let lp = pair_log_evidence(2.0 * s - 1.0, 2.0 * r - 1.0, depth + 1, config, visited)?;
        Ok(combine_log_evidence(
            0.0,
            lp,
            SplitCounts::new(0, 2),
            config,
        ))
    }
}

/// Mass below residual `r` within the node's cell, on the cell's own scale.
fn cdf_cell(node: &TreeNode, r: f64, config: &ModelConfig, visited: &mut usize) -> Result<f64> {
    *visited += 1;
    match &node.kind {
        // Empty and capped cells emit uniformly.
        NodeKind::Leaf(None) | NodeKind::Capped(_) => Ok(r),
        NodeKind::Leaf(Some(y)) => {
            let s = replay_residual(*y, node.depth);
            singleton_cdf(s, r, node.depth, config, visited)
        }
        NodeKind::Split { left, right } => {
            let g = node.summary.split_posterior;
            let n = node.n as f64;
            let share_left = (left.n as f64 + 1.0) / (n + 2.0);
            let share_right = (right.n as f64 + 1.0) / (n + 2.0);
            if r < 0.5 {
                let c = cdf_cell(left, 2.0 * r, config, visited)?;
                Ok((1.0 - g) * r + g * share_left * c)
            } else {
                let c = cdf_cell(right, 2.0 * r - 1.0, config, visited)?;
                Ok((1.0 - g) * r + g * (share_left + share_right * c))
            }
        }
    }
}

/// Mass below `r` in a cell at `depth` holding one point at residual `s`.
fn singleton_cdf(
    s: f64,
    r: f64,
    depth: u32,
    config: &ModelConfig,
    visited: &mut usize,
) -> Result<f64> {
    *visited += 1;
    if r == 0.0 {
        return Ok(0.0);
    }
    if depth >= config.max_depth {
        // The query region boundary rides with the point down to the cap,
        // where the cell is unresolved; the policy decides, as it does for
        // a predictive query here.
        return match config.duplicate_policy {
            DuplicatePolicy::Truncate => Ok(r),
            DuplicatePolicy::Error => Err(Error::DuplicateData { depth }),
        };
    }
    let b = config.split_prior;
    match (s < 0.5, r < 0.5) {
        (true, true) => {
            let c = singleton_cdf(2.0 * s, 2.0 * r, depth + 1, config, visited)?;
            Ok((1.0 - b) * r + b * OCCUPIED_SHARE * c)
        }
        (false, false) => {
            let c = singleton_cdf(2.0 * s - 1.0, 2.0 * r - 1.0, depth + 1, config, visited)?;
            Ok((1.0 - b) * r + b * (EMPTY_SHARE + OCCUPIED_SHARE * c))
        }
        // Point right, boundary left: everything below r is in the empty
        // half, which is uniform with total mass 1/3.
        (false, true) => Ok((1.0 - b) * r + b * EMPTY_SHARE * (2.0 * r)),
        // Point left, boundary right: the whole occupied half lies below.
        (true, false) => Ok((1.0 - b) * r + b * (OCCUPIED_SHARE + EMPTY_SHARE * (2.0 * r - 1.0))),
    }
}

fn height_cell(node: &TreeNode, r: f64, config: &ModelConfig) -> f64 {
    match &node.kind {
        // Closed form: cells with at most one point report the fixed-point
        // height at every interior position.
        NodeKind::Leaf(_) => config.leaf_height(),
        NodeKind::Capped(_) => 0.0,
        NodeKind::Split { left, right } => {
            let g = node.summary.split_posterior;
            let child = if r < 0.5 {
                height_cell(left, 2.0 * r, config)
            } else {
                height_cell(right, 2.0 * r - 1.0, config)
            };
            g * (1.0 + child)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate, QueryPosition};
    use crate::ModelConfig;

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol,
            "got {got}, want {want} (diff {})",
            (got - want).abs()
        );
    }

    fn fit(data: &[f64]) -> FittedTree {
        FittedTree::fit(data, ModelConfig::default()).unwrap()
    }

    #[test]
    fn empty_tree_predicts_uniformly() {
        let tree = fit(&[]);
        for x in [0.0, 0.3, 0.999] {
            assert_eq!(tree.predictive_density(x).unwrap(), 1.0);
            assert_eq!(tree.cdf(x).unwrap(), x);
        }
        assert_eq!(tree.cdf(1.0).unwrap(), 1.0);
        assert_eq!(tree.height_at(0.42).unwrap(), 1.0);
    }

    #[test]
    fn added_evidence_matches_a_refit() {
        let config = ModelConfig::default();
        let data = [0.12, 0.13, 0.35, 0.5, 0.52, 0.9];
        let tree = fit(&data);
        for x in [0.01, 0.125, 0.3, 0.5, 0.500001, 0.77, 0.9000001] {
            let mut grown = data.to_vec();
            grown.push(x);
            grown.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let refit = evaluate(&grown, QueryPosition::Absent, &config).unwrap();
            let walked = tree.added_log_evidence(x).unwrap() + tree.log_evidence();
            // The walk reproduces the refit exactly before the difference
            // and re-addition of the old evidence round.
            assert_close(walked, refit.log_evidence, 1e-13);
        }
    }

    #[test]
    fn adding_an_exact_duplicate_follows_the_policy() {
        let data = [0.2, 0.7];
        let tree = fit(&data);
        let lp = tree.added_log_evidence(0.7).unwrap();
        assert!(lp > 0.0, "duplicate should beat the uniform rate, got {lp}");
        let config = ModelConfig::default();
        let refit = evaluate(&[0.2, 0.7, 0.7], QueryPosition::Absent, &config).unwrap();
        assert_close(lp + tree.log_evidence(), refit.log_evidence, 1e-13);

        let strict = ModelConfig {
            duplicate_policy: crate::model::DuplicatePolicy::Error,
            ..ModelConfig::default()
        };
        let tree = FittedTree::fit(&data, strict).unwrap();
        assert!(matches!(
            tree.added_log_evidence(0.7),
            Err(Error::DuplicateData { depth: 52 })
        ));
        // Separated queries are unaffected by the policy.
        assert!(tree.added_log_evidence(0.4).is_ok());
    }

    #[test]
    fn cdf_is_monotone_and_hits_the_endpoints() {
        let tree = fit(&[0.1, 0.11, 0.5, 0.8]);
        assert_eq!(tree.cdf(0.0).unwrap(), 0.0);
        assert_eq!(tree.cdf(1.0).unwrap(), 1.0);
        let mut prev = 0.0;
        for i in 0..=1000 {
            let c = tree.cdf(i as f64 / 1000.0).unwrap();
            assert!(c >= prev, "cdf dipped at {i}");
            prev = c;
        }
    }

    #[test]
    fn cdf_matches_quadrature_of_the_density() {
        let tree = fit(&[0.2, 0.21, 0.6]);
        let grid = 20_000;
        let mut acc = 0.0;
        for i in 0..grid {
            let x = (i as f64 + 0.5) / grid as f64;
            acc += tree.predictive_density(x).unwrap() / grid as f64;
            let c = tree.cdf((i as f64 + 1.0) / grid as f64).unwrap();
            assert_close(acc, c, 2e-4);
        }
        assert_close(acc, 1.0, 1e-6);
    }

    #[test]
    fn singleton_cell_mass_favors_the_occupied_half() {
        // One point at 0.25: mass of [0, 1/2) = (1-b)/2 + b * 2/3 = 7/12.
        let tree = fit(&[0.25]);
        assert_close(tree.cdf(0.5).unwrap(), 7.0 / 12.0, 1e-15);
    }

    #[test]
    fn height_walk_matches_the_evaluator() {
        let config = ModelConfig::default();
        let data = [0.12, 0.13, 0.35, 0.5, 0.52, 0.9];
        let tree = fit(&data);
        for x in [0.0, 0.12, 0.129999, 0.3, 0.51, 0.9, 0.99] {
            let direct = evaluate(&data, QueryPosition::Inside(x), &config).unwrap();
            assert_close(
                tree.height_at(x).unwrap(),
                direct.height_at_query,
                1e-12,
            );
        }
    }

    #[test]
    fn density_walk_touches_a_bounded_slice_of_a_large_tree() {
        let data: Vec<f64> = (0..50_000).map(|i| (i as f64 + 0.5) / 50_000.0).collect();
        let tree = fit(&data);
        let (_, visited) = tree.predictive_density_traced(0.371).unwrap();
        let nodes = tree.summary().node_count;
        assert!(nodes >= 99_999, "tree unexpectedly small: {nodes}");
        assert!(visited <= 120, "visited {visited} nodes");
        let (_, visited) = tree.cdf_traced(0.371).unwrap();
        assert!(visited <= 120, "visited {visited} nodes");
    }

    #[test]
    fn queries_outside_the_interval_are_rejected() {
        let tree = fit(&[0.4]);
        assert!(tree.predictive_density(1.0).is_err());
        assert!(tree.predictive_density(-0.2).is_err());
        assert!(tree.predictive_density(f64::NAN).is_err());
        assert!(tree.cdf(1.5).is_err());
        assert!(tree.cdf(f64::NAN).is_err());
        assert!(tree.height_at(1.0).is_err());
    }
}
