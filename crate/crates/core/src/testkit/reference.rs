//! Reference evaluation of the depth-m model.
//!
//! Unlike the production evaluator, this recursion never inserts the
//! closed-form leaves: it splits every cell down to depth m and terminates
//! there with the fixed-depth leaf (evidence 1, heights 0, no splits).
//! Empty subtrees depend only on the remaining depth, so they are tabulated
//! once per call; everything else is evaluated directly.

use crate::error::Result;
use crate::model::{
    check_data, check_query, combine, depth_capped_summary, ModelConfig, NodeSummary,
    QueryPosition, SplitCounts,
};

/// Summaries of the model truncated at depth `m`. On data whose points all
/// separate above depth m this matches the infinite evaluator exactly on
/// evidence; heights genuinely depend on m and converge to the infinite
/// values like split_prior^(m - separation level).
pub fn finite_depth_evaluate(
    data: &[f64],
    query: QueryPosition,
    m: u32,
    config: &ModelConfig,
) -> Result<NodeSummary> {
    config.validate()?;
    check_data(data)?;
    check_query(query)?;
    let chain = EmptyChain::build(m, config);
    let mut scratch = data.to_vec();
    Ok(eval_cell(&mut scratch, query, m, &chain, config))
}

/// Tabulated summaries of an empty cell with r levels of model left,
/// indexed by r. The variant threaded by a query differs only in
/// height_at_query, kept as a parallel vector.
struct EmptyChain {
    summaries: Vec<NodeSummary>,
    inside_heights: Vec<f64>,
}

impl EmptyChain {
    fn build(m: u32, config: &ModelConfig) -> Self {
        let mut summaries = vec![depth_capped_summary(config)];
        let mut inside_heights = vec![0.0];
        for r in 1..=m as usize {
            let child = &summaries[r - 1];
            let parent = combine(
                child,
                child,
                SplitCounts::new(0, 0),
                QueryPosition::Absent,
                config,
            );
            // Rebuild the parent with the query riding down one branch; only
            // the height changes, and adding the other branch's 0.0 height
            // keeps it bit-identical to an unmemoized descent.
            let mut carrier = child.clone();
            carrier.height_at_query = inside_heights[r - 1];
            let threaded = combine(
                &carrier,
                child,
                SplitCounts::new(0, 0),
                QueryPosition::Inside(0.25),
                config,
            );
            inside_heights.push(threaded.height_at_query);
            summaries.push(parent);
        }
        EmptyChain {
            summaries,
            inside_heights,
        }
    }

    fn summary(&self, remaining: u32, query: QueryPosition) -> NodeSummary {
        let mut s = self.summaries[remaining as usize].clone();
        if query.is_inside() {
            s.height_at_query = self.inside_heights[remaining as usize];
        }
        s
    }
}

fn eval_cell(
    data: &mut [f64],
    query: QueryPosition,
    remaining: u32,
    chain: &EmptyChain,
    config: &ModelConfig,
) -> NodeSummary {
    if remaining == 0 {
        return depth_capped_summary(config);
    }
    if data.is_empty() {
        return chain.summary(remaining, query);
    }
    let cut = data.partition_point(|&x| x < 0.5);
    let (lo, hi) = data.split_at_mut(cut);
    for v in lo.iter_mut() {
        *v *= 2.0;
    }
    for v in hi.iter_mut() {
        *v = 2.0 * *v - 1.0;
    }
    let counts = SplitCounts::new(lo.len() as u64, hi.len() as u64);
    let (query_left, query_right) = query.descend();
    let left = eval_cell(lo, query_left, remaining - 1, chain, config);
    let right = eval_cell(hi, query_right, remaining - 1, chain, config);
    combine(&left, &right, counts, query, config)
}
