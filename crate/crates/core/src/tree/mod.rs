//! A stored form of the evaluation recursion that supports point queries,
//! sampling, and in-place updates without re-walking the data.
//!
//! The tree keeps exactly the cells the recursion visits: splits down to
//! where points separate, leaves holding at most one point, and capped
//! cells where duplicates hit the depth limit. Every node carries the same
//! summary the one-shot evaluator would report for it, so a freshly fitted
//! tree and [`crate::model::evaluate`] agree bit for bit.

mod path;
mod sample;
mod update;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    check_data, combine, depth_capped_summary, leaf_summary, log_weight, DuplicatePolicy,
    ModelConfig, NodeSummary, QueryPosition, SplitCounts,
};

/// One cell of the fitted partition tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    depth: u32,
    n: u64,
    summary: NodeSummary,
    kind: NodeKind,
}

/// Leaves store the points in their original coordinates; cell-relative
/// residuals are recomputed by replaying the bisection map, which is exact,
/// while inverting it is not.
#[derive(Debug, Clone, PartialEq)]
enum NodeKind {
    /// At most one point; the subtree below is the closed-form infinite one.
    Leaf(Option<f64>),
    /// Two or more points still together at the depth cap, sorted.
    Capped(Vec<f64>),
    Split {
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn leaf(depth: u32, datum: Option<f64>, config: &ModelConfig) -> TreeNode {
        let n = datum.is_some() as u64;
        TreeNode {
            depth,
            n,
            summary: leaf_summary(n, QueryPosition::Absent, config),
            kind: NodeKind::Leaf(datum),
        }
    }

    fn split(depth: u32, left: TreeNode, right: TreeNode, config: &ModelConfig) -> TreeNode {
        let counts = SplitCounts::new(left.n, right.n);
        let summary = combine(
            &left.summary,
            &right.summary,
            counts,
            QueryPosition::Absent,
            config,
        );
        TreeNode {
            depth,
            n: counts.total(),
            summary,
            kind: NodeKind::Split {
                left: Box::new(left),
                right: Box::new(right),
            },
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Number of data points in this cell.
    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// The cell's posterior summary, computed without a query point
    /// (`height_at_query` is 0 by convention).
    pub fn summary(&self) -> &NodeSummary {
        &self.summary
    }

    pub fn children(&self) -> Option<(&TreeNode, &TreeNode)> {
        match &self.kind {
            NodeKind::Split { left, right } => Some((left, right)),
            _ => None,
        }
    }

    /// The stored point of a leaf holding exactly one, in original
    /// coordinates.
    pub fn leaf_datum(&self) -> Option<f64> {
        match self.kind {
            NodeKind::Leaf(d) => d,
            _ => None,
        }
    }

    /// Points of a cell closed at the depth cap, if this is one.
    pub fn capped_data(&self) -> Option<&[f64]> {
        match &self.kind {
            NodeKind::Capped(v) => Some(v),
            _ => None,
        }
    }

    fn push_data(&self, out: &mut Vec<f64>) {
        match &self.kind {
            NodeKind::Leaf(None) => {}
            NodeKind::Leaf(Some(x)) => out.push(*x),
            NodeKind::Capped(v) => out.extend_from_slice(v),
            NodeKind::Split { left, right } => {
                left.push_data(out);
                right.push_data(out);
            }
        }
    }
}

/// How many stored nodes of each kind a tree has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub nodes: u64,
    pub empty_leaves: u64,
    pub occupied_leaves: u64,
    pub capped_cells: u64,
    pub deepest_node: u32,
}

/// One cell of a reported partition, in original coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellReport {
    pub lo: f64,
    pub hi: f64,
    pub depth: u32,
    pub count: u64,
}

/// The model fitted to a data set: a partition tree with posterior
/// summaries at every cell.
///
/// Fitting costs O(n log n); afterwards, point queries such as
/// [`predictive_density`](FittedTree::predictive_density) walk a single
/// root-to-leaf path, and [`insert`](FittedTree::insert) and
/// [`remove`](FittedTree::remove) rebuild only that path.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedTree {
    root: TreeNode,
    config: ModelConfig,
}

impl FittedTree {
    /// Fits the model to `data`, which may arrive in any order. Negative
    /// zero is stored as 0.0.
    pub fn fit(data: &[f64], config: ModelConfig) -> Result<FittedTree> {
        config.validate()?;
        let mut sorted: Vec<f64> = data.iter().map(|&x| normalize(x)).collect();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        check_data(&sorted)?;
        let mut residuals = sorted.clone();
        let root = build_cell(&sorted, &mut residuals, 0, &config)?;
        Ok(FittedTree { root, config })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Number of stored data points.
    pub fn len(&self) -> usize {
        self.root.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.root.n == 0
    }

    /// Root summary; identical to evaluating the data set in one shot
    /// without a query point.
    pub fn summary(&self) -> &NodeSummary {
        &self.root.summary
    }

    /// ln p(data): log marginal likelihood of everything stored.
    pub fn log_evidence(&self) -> f64 {
        self.root.summary.log_evidence
    }

    /// All stored points, sorted ascending, in original coordinates.
    pub fn stored_data(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        self.root.push_data(&mut out);
        out
    }

    pub fn node_stats(&self) -> TreeStats {
        let mut stats = TreeStats {
            nodes: 0,
            empty_leaves: 0,
            occupied_leaves: 0,
            capped_cells: 0,
            deepest_node: 0,
        };
        count_nodes(&self.root, &mut stats);
        stats
    }

    /// Cells of the single most probable partition, left to right.
    ///
    /// An internal split survives when splitting raises the maximized
    /// posterior strictly; a cell with at most one point always stops, which
    /// is where the true maximum lies for such cells at every prior in
    /// (0, 1/2].
    pub fn map_partition(&self) -> Vec<CellReport> {
        let (_, cells) = map_cells(&self.root, 0.0, 1.0, &self.config);
        cells
    }
}

fn normalize(x: f64) -> f64 {
    // -0.0 would break exact-match removal; there is one zero.
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Residual of `x` inside its cell at `depth`: the first `depth` bisection
/// rescalings applied to `x`, each exact in f64.
fn replay_residual(x: f64, depth: u32) -> f64 {
    let mut r = x;
    for _ in 0..depth {
        r = if r < 0.5 { 2.0 * r } else { 2.0 * r - 1.0 };
    }
    r
}

fn build_cell(
    orig: &[f64],
    residuals: &mut [f64],
    depth: u32,
    config: &ModelConfig,
) -> Result<TreeNode> {
    let n = residuals.len();
    if n <= 1 {
        return Ok(TreeNode::leaf(depth, orig.first().copied(), config));
    }
    if depth >= config.max_depth {
        return match config.duplicate_policy {
            DuplicatePolicy::Truncate => Ok(TreeNode {
                depth,
                n: n as u64,
                summary: depth_capped_summary(config),
                kind: NodeKind::Capped(orig.to_vec()),
            }),
            DuplicatePolicy::Error => Err(Error::DuplicateData { depth }),
        };
    }
    let cut = residuals.partition_point(|&x| x < 0.5);
    let (res_lo, res_hi) = residuals.split_at_mut(cut);
    let (orig_lo, orig_hi) = orig.split_at(cut);
    for v in res_lo.iter_mut() {
        *v *= 2.0;
    }
    for v in res_hi.iter_mut() {
        *v = 2.0 * *v - 1.0;
    }
    let left = build_cell(orig_lo, res_lo, depth + 1, config)?;
    let right = build_cell(orig_hi, res_hi, depth + 1, config)?;
    Ok(TreeNode::split(depth, left, right, config))
}

fn count_nodes(node: &TreeNode, stats: &mut TreeStats) {
    stats.nodes += 1;
    stats.deepest_node = stats.deepest_node.max(node.depth);
    match &node.kind {
        NodeKind::Leaf(None) => stats.empty_leaves += 1,
        NodeKind::Leaf(Some(_)) => stats.occupied_leaves += 1,
        NodeKind::Capped(_) => stats.capped_cells += 1,
        NodeKind::Split { left, right } => {
            count_nodes(left, stats);
            count_nodes(right, stats);
        }
    }
}

/// Returns the maximized log posterior contribution of the subtree and the
/// cells of its maximizing partition.
fn map_cells(
    node: &TreeNode,
    lo: f64,
    width: f64,
    config: &ModelConfig,
) -> (f64, Vec<CellReport>) {
    let cell = CellReport {
        lo,
        hi: lo + width,
        depth: node.depth,
        count: node.n,
    };
    let stop = (1.0 - config.split_prior).ln();
    match &node.kind {
        NodeKind::Leaf(_) => (stop, vec![cell]),
        // A capped cell is forced: it contributes no stop-or-split choice.
        NodeKind::Capped(_) => (0.0, vec![cell]),
        NodeKind::Split { left, right } => {
            let half = width / 2.0;
            let (lm_left, cells_left) = map_cells(left, lo, half, config);
            let (lm_right, cells_right) = map_cells(right, lo + half, half, config);
            let counts = SplitCounts::new(left.n, right.n);
            let split = config.split_prior.ln() + lm_left + lm_right - log_weight(counts);
            if split > stop {
                let mut cells = cells_left;
                cells.extend(cells_right);
                (split, cells)
            } else {
                (stop, vec![cell])
            }
        }
    }
}
