//! The mixture model over recursive bisections of [0, 1) and its exact
//! evaluation.
//!
//! A cell either stays uniform (prior 1 - split_prior) or splits at its
//! midpoint into two children, recursively and independently. Conditioning
//! on data, every posterior quantity of interest satisfies a two-child
//! recursion; cells holding at most one point admit closed forms for the
//! full infinite subtree, so the recursion only ever descends until data
//! points separate. Evaluation therefore costs O(n log n) and involves no
//! sampling and no truncation error.

mod coeffs;
mod combine;
mod config;
mod summary;
mod weight;

pub use coeffs::prior_dim_coeffs;
pub use combine::{combine, leaf_summary};
pub use config::{DuplicatePolicy, ModelConfig};
pub use summary::{DimensionDistribution, NodeSummary, QueryPosition, SplitCounts};
pub use weight::{ln_factorial, log_weight};

pub(crate) use combine::{combine_log_evidence, depth_capped_summary};

use crate::error::{Error, Result};

/// Evaluates the model over `data`, which must be sorted ascending and lie
/// in [0, 1). The optional query point rides along through the recursion so
/// that the reported `height_at_query` refers to it.
pub fn evaluate(data: &[f64], query: QueryPosition, config: &ModelConfig) -> Result<NodeSummary> {
    evaluate_forced(data, query, config, 0)
}

/// Like [`evaluate`], but keeps splitting for `extra_depth` extra levels
/// below each point where the recursion would normally stop. All reported
/// quantities except `node_count` are invariant in `extra_depth`; this is a
/// correctness check, not something callers should need. Costs grow like
/// 2^extra_depth per leaf.
pub fn evaluate_forced(
    data: &[f64],
    query: QueryPosition,
    config: &ModelConfig,
    extra_depth: u32,
) -> Result<NodeSummary> {
    config.validate()?;
    check_data(data)?;
    check_query(query)?;
    if extra_depth > 24 {
        return Err(Error::InvalidArgument(format!(
            "extra_depth {extra_depth} would force over 2^25 nodes per leaf"
        )));
    }
    let mut scratch = data.to_vec();
    evaluate_cell(&mut scratch, query, 0, extra_depth, config)
}

pub(crate) fn check_data(data: &[f64]) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for (i, &x) in data.iter().enumerate() {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!(
                "data[{i}] = {x} is outside [0, 1)"
            )));
        }
        if x < prev {
            return Err(Error::InvalidArgument(format!(
                "data must be sorted ascending, but data[{i}] = {x} follows {prev}"
            )));
        }
        prev = x;
    }
    Ok(())
}

pub(crate) fn check_query(query: QueryPosition) -> Result<()> {
    match query {
        QueryPosition::Inside(r) if !(0.0..1.0).contains(&r) => Err(Error::InvalidArgument(
            format!("query position {r} is outside [0, 1)"),
        )),
        _ => Ok(()),
    }
}

/// Core recursion. `data` is a scratch slice holding the cell's points in
/// cell coordinates; it is partitioned and rescaled in place as the
/// recursion descends (both half-rescalings are exact in f64).
fn evaluate_cell(
    data: &mut [f64],
    query: QueryPosition,
    depth: u32,
    force: u32,
    config: &ModelConfig,
) -> Result<NodeSummary> {
    let n = data.len();
    if n <= 1 {
        let separated = n == 0
            || match query {
                QueryPosition::Inside(r) => r == data[0],
                _ => true,
            };
        if separated && force == 0 {
            return Ok(leaf_summary(n as u64, query, config));
        }
        if depth >= config.max_depth {
            // The cap also ends pursuit of a query that never separates
            // from the datum; at this resolution they coincide.
            return Ok(leaf_summary(n as u64, query, config));
        }
        let next_force = if separated { force - 1 } else { force };
        return split_cell(data, query, depth, next_force, config);
    }
    if depth >= config.max_depth {
        return match config.duplicate_policy {
            DuplicatePolicy::Truncate => Ok(depth_capped_summary(config)),
            DuplicatePolicy::Error => Err(Error::DuplicateData { depth }),
        };
    }
    split_cell(data, query, depth, force, config)
}

fn split_cell(
    data: &mut [f64],
    query: QueryPosition,
    depth: u32,
    force: u32,
    config: &ModelConfig,
) -> Result<NodeSummary> {
    // Points at exactly 1/2 go right. The slice is sorted, so both halves
    // are contiguous and stay sorted under the affine rescalings.
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
    let left = evaluate_cell(lo, query_left, depth + 1, force, config)?;
    let right = evaluate_cell(hi, query_right, depth + 1, force, config)?;
    Ok(combine(&left, &right, counts, query, config))
}
