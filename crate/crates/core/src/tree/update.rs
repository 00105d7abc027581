//! In-place insertion and removal. Only the root-to-leaf path of the
//! touched point is recomputed; the result is bit-identical to refitting
//! from scratch on the updated data set.

use crate::error::{Error, Result};
use crate::model::{DuplicatePolicy, ModelConfig, QueryPosition};

use super::{normalize, replay_residual, FittedTree, NodeKind, TreeNode};

impl FittedTree {
    /// Adds one point. On error (out-of-range input, or an exact duplicate
    /// under the erroring policy) the tree is left unchanged.
    pub fn insert(&mut self, x: f64) -> Result<()> {
        let x = check_insertable(x)?;
        let config = self.config.clone();
        insert_cell(&mut self.root, x, x, &config)
    }

    /// Removes one point previously inserted, by exact match. On error the
    /// tree is left unchanged; removing one of several duplicates keeps the
    /// others.
    pub fn remove(&mut self, x: f64) -> Result<()> {
        let x = check_insertable(x)?;
        let config = self.config.clone();
        remove_cell(&mut self.root, x, x, &config)
    }
}

fn check_insertable(x: f64) -> Result<f64> {
    let x = normalize(x);
    if (0.0..1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::InvalidArgument(format!(
            "point {x} is outside [0, 1)"
        )))
    }
}

/// `r` is the point's residual in this node's cell; `orig` its original
/// coordinate. Children are updated before any field of this node, so a
/// failed recursion leaves everything untouched.
fn insert_cell(node: &mut TreeNode, r: f64, orig: f64, config: &ModelConfig) -> Result<()> {
    match &mut node.kind {
        NodeKind::Leaf(slot @ None) => {
            *slot = Some(orig);
            node.n = 1;
            node.summary = crate::model::leaf_summary(1, QueryPosition::Absent, config);
            Ok(())
        }
        NodeKind::Leaf(Some(stored)) => {
            let stored_orig = *stored;
            let s = replay_residual(stored_orig, node.depth);
            let grown = extend_pair(node.depth, s, stored_orig, r, orig, config)?;
            *node = grown;
            Ok(())
        }
        NodeKind::Capped(points) => {
            // Capped cells exist only under the truncating policy; their
            // summary does not depend on the points.
            let at = points.partition_point(|&p| p < orig);
            points.insert(at, orig);
            node.n += 1;
            Ok(())
        }
        NodeKind::Split { left, right } => {
            if r < 0.5 {
                insert_cell(left, 2.0 * r, orig, config)?;
            } else {
                insert_cell(right, 2.0 * r - 1.0, orig, config)?;
            }
            refresh_split(node, config);
            Ok(())
        }
    }
}

/// Builds the chain of splits that separates two points sharing a cell at
/// `depth`, or the capped cell if they never separate above the limit.
fn extend_pair(
    depth: u32,
    s: f64,
    s_orig: f64,
    r: f64,
    r_orig: f64,
    config: &ModelConfig,
) -> Result<TreeNode> {
    if depth >= config.max_depth {
        return match config.duplicate_policy {
            DuplicatePolicy::Truncate => {
                let mut points = vec![s_orig, r_orig];
                points.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                Ok(TreeNode {
                    depth,
                    n: 2,
                    summary: crate::model::depth_capped_summary(config),
                    kind: NodeKind::Capped(points),
                })
            }
            DuplicatePolicy::Error => Err(Error::DuplicateData { depth }),
        };
    }
    let s_left = s < 0.5;
    let r_left = r < 0.5;
    let (left, right) = if s_left == r_left {
        let child = if s_left {
            extend_pair(depth + 1, 2.0 * s, s_orig, 2.0 * r, r_orig, config)?
        } else {
            extend_pair(
                depth + 1,
                2.0 * s - 1.0,
                s_orig,
                2.0 * r - 1.0,
                r_orig,
                config,
            )?
        };
        let empty = TreeNode::leaf(depth + 1, None, config);
        if s_left {
            (child, empty)
        } else {
            (empty, child)
        }
    } else {
        let (left_orig, right_orig) = if s_left {
            (s_orig, r_orig)
        } else {
            (r_orig, s_orig)
        };
        (
            TreeNode::leaf(depth + 1, Some(left_orig), config),
            TreeNode::leaf(depth + 1, Some(right_orig), config),
        )
    };
    Ok(TreeNode::split(depth, left, right, config))
}

fn remove_cell(node: &mut TreeNode, r: f64, orig: f64, config: &ModelConfig) -> Result<()> {
    let collapse = match &mut node.kind {
        NodeKind::Leaf(None) => return Err(Error::NotFound(orig)),
        NodeKind::Leaf(slot) => {
            if *slot != Some(orig) {
                return Err(Error::NotFound(orig));
            }
            *slot = None;
            node.n = 0;
            node.summary = crate::model::leaf_summary(0, QueryPosition::Absent, config);
            return Ok(());
        }
        NodeKind::Capped(points) => {
            let at = points
                .binary_search_by(|p| p.partial_cmp(&orig).unwrap())
                .map_err(|_| Error::NotFound(orig))?;
            points.remove(at);
            node.n -= 1;
            if node.n == 1 {
                let last = points[0];
                node.kind = NodeKind::Leaf(Some(last));
                node.summary = crate::model::leaf_summary(1, QueryPosition::Absent, config);
            }
            return Ok(());
        }
        NodeKind::Split { left, right } => {
            if r < 0.5 {
                remove_cell(left, 2.0 * r, orig, config)?;
            } else {
                remove_cell(right, 2.0 * r - 1.0, orig, config)?;
            }
            left.n + right.n <= 1
        }
    };
    if collapse {
        // A refit would stop here now; drop the chain that only existed to
        // separate the removed point.
        let mut rest = Vec::with_capacity(1);
        node.push_data(&mut rest);
        node.n = rest.len() as u64;
        node.summary = crate::model::leaf_summary(node.n, QueryPosition::Absent, config);
        node.kind = NodeKind::Leaf(rest.first().copied());
    } else {
        refresh_split(node, config);
    }
    Ok(())
}

fn refresh_split(node: &mut TreeNode, config: &ModelConfig) {
    if let NodeKind::Split { left, right } = &node.kind {
        let counts = crate::model::SplitCounts::new(left.n, right.n);
        node.n = counts.total();
        node.summary = crate::model::combine(
            &left.summary,
            &right.summary,
            counts,
            QueryPosition::Absent,
            config,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ModelConfig;

    fn refit(data: &[f64]) -> FittedTree {
        FittedTree::fit(data, ModelConfig::default()).unwrap()
    }

    #[test]
    fn inserting_into_an_empty_tree_matches_a_fit() {
        let mut tree = refit(&[]);
        tree.insert(0.37).unwrap();
        assert_eq!(tree, refit(&[0.37]));
    }

    #[test]
    fn a_chain_of_inserts_matches_refits_exactly() {
        let points = [0.5, 0.25, 0.250001, 0.9, 0.0, 0.25, 0.7499999];
        let mut tree = refit(&[]);
        let mut so_far: Vec<f64> = Vec::new();
        for &x in &points {
            tree.insert(x).unwrap();
            so_far.push(x);
            assert_eq!(tree, refit(&so_far), "after inserting {x}");
        }
    }

    #[test]
    fn removals_match_refits_exactly() {
        let points = [0.5, 0.25, 0.250001, 0.9, 0.0, 0.25, 0.7499999];
        let mut tree = refit(&points);
        let mut remaining = points.to_vec();
        for &x in &[0.25, 0.9, 0.5, 0.250001, 0.0] {
            tree.remove(x).unwrap();
            let at = remaining.iter().position(|&p| p == x).unwrap();
            remaining.remove(at);
            assert_eq!(tree, refit(&remaining), "after removing {x}");
        }
    }

    #[test]
    fn insert_then_remove_restores_the_tree() {
        let base = [0.12, 0.34, 0.34001, 0.8];
        let tree = refit(&base);
        for x in [0.05, 0.34, 0.3400000001, 0.999] {
            let mut touched = tree.clone();
            touched.insert(x).unwrap();
            touched.remove(x).unwrap();
            assert_eq!(touched, tree, "after bouncing {x}");
        }
    }

    #[test]
    fn removing_an_absent_point_fails_and_changes_nothing() {
        let mut tree = refit(&[0.2, 0.7]);
        let before = tree.clone();
        assert_eq!(tree.remove(0.3), Err(Error::NotFound(0.3)));
        // Same cell as a stored point, different value.
        assert_eq!(tree.remove(0.7000001), Err(Error::NotFound(0.7000001)));
        assert_eq!(tree.remove(1.5), Err(Error::InvalidArgument(
            "point 1.5 is outside [0, 1)".to_string()
        )));
        assert_eq!(tree, before);
    }

    #[test]
    fn duplicate_insert_is_rejected_under_the_erroring_policy() {
        let strict = ModelConfig {
            duplicate_policy: DuplicatePolicy::Error,
            ..ModelConfig::default()
        };
        let mut tree = FittedTree::fit(&[0.2, 0.7], strict).unwrap();
        let before = tree.clone();
        assert_eq!(tree.insert(0.7), Err(Error::DuplicateData { depth: 52 }));
        assert_eq!(tree, before);
        tree.insert(0.7000001).unwrap();
        assert_eq!(tree.len(), 3);
    }

    #[test]
    fn duplicates_accumulate_in_a_capped_cell_and_drain_back_out() {
        let mut tree = refit(&[0.2, 0.7]);
        tree.insert(0.7).unwrap();
        tree.insert(0.7).unwrap();
        assert_eq!(tree, refit(&[0.2, 0.7, 0.7, 0.7]));
        assert_eq!(tree.node_stats().capped_cells, 1);
        tree.remove(0.7).unwrap();
        tree.remove(0.7).unwrap();
        assert_eq!(tree, refit(&[0.2, 0.7]));
        assert_eq!(tree.node_stats().capped_cells, 0);
    }

    #[test]
    fn negative_zero_inserts_and_removes_as_zero() {
        let mut tree = refit(&[0.5]);
        tree.insert(-0.0).unwrap();
        assert_eq!(tree, refit(&[0.0, 0.5]));
        tree.remove(0.0).unwrap();
        assert_eq!(tree, refit(&[0.5]));
    }
}
