//! Ancestral sampling from the posterior predictive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::ModelConfig;

use super::{replay_residual, FittedTree, NodeKind, TreeNode};

impl FittedTree {
    /// One draw from the posterior predictive distribution.
    ///
    /// Walks the stored tree choosing "stay uniform" against "descend" by
    /// each cell's split posterior, continues virtually below stored
    /// leaves, and emits uniformly in the final cell. Descents below the
    /// depth cap are cut off there, matching the evaluator's treatment of
    /// unresolved cells.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_cell(&self.root, 0.0, 1.0, &self.config, rng)
    }

    /// `n` draws from a fresh deterministic generator.
    pub fn sample_many(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }
}

fn sample_cell<R: Rng + ?Sized>(
    node: &TreeNode,
    lo: f64,
    width: f64,
    config: &ModelConfig,
    rng: &mut R,
) -> f64 {
    match &node.kind {
        NodeKind::Leaf(None) | NodeKind::Capped(_) => emit_uniform(lo, width, rng),
        NodeKind::Leaf(Some(y)) => {
            let s = replay_residual(*y, node.depth);
            sample_singleton(s, node.depth, lo, width, config, rng)
        }
        NodeKind::Split { left, right } => {
            if rng.gen::<f64>() >= node.summary.split_posterior {
                return emit_uniform(lo, width, rng);
            }
            let share_left = (left.n as f64 + 1.0) / (node.n as f64 + 2.0);
            let half = width / 2.0;
            if rng.gen::<f64>() < share_left {
                sample_cell(left, lo, half, config, rng)
            } else {
                sample_cell(right, lo + half, half, config, rng)
            }
        }
    }
}

/// Sampling below a stored leaf holding one point: descend toward the
/// occupied half with probability 2/3, or emit uniformly in the empty one.
fn sample_singleton<R: Rng + ?Sized>(
    s: f64,
    depth: u32,
    lo: f64,
    width: f64,
    config: &ModelConfig,
    rng: &mut R,
) -> f64 {
    let mut s = s;
    let mut depth = depth;
    let mut lo = lo;
    let mut width = width;
    loop {
        if depth >= config.max_depth || rng.gen::<f64>() >= config.split_prior {
            return emit_uniform(lo, width, rng);
        }
        let half = width / 2.0;
        let occupied_left = s < 0.5;
        let toward_point = rng.gen::<f64>() < 2.0 / 3.0;
        let go_left = occupied_left == toward_point;
        if !go_left {
            lo += half;
        }
        if !toward_point {
            return emit_uniform(lo, half, rng);
        }
        s = if occupied_left { 2.0 * s } else { 2.0 * s - 1.0 };
        width = half;
        depth += 1;
    }
}

fn emit_uniform<R: Rng + ?Sized>(lo: f64, width: f64, rng: &mut R) -> f64 {
    let x = lo + width * rng.gen::<f64>();
    let hi = lo + width;
    if x < hi {
        x
    } else {
        // A draw within half an ulp of the upper bound can round onto it;
        // the emitted point must stay inside the half-open cell.
        f64::from_bits(hi.to_bits() - 1)
    }
}
