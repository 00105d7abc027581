//! Exact Bayesian density estimation over recursive halvings of `[0, 1)`.
//!
//! The model places a prior over all binary trees of dyadic subintervals:
//! each cell either keeps a uniform density or splits in half, recursively
//! and without bound. Averaging over that infinite family sounds hopeless,
//! but every quantity of interest collapses to a finite recursion that
//! stops where the data separate, so results carry no truncation error and
//! fitting costs `O(n log n)` after sorting.
//!
//! [`FittedTree`] is the main entry point: it stores the recursion's state
//! per cell and answers queries in one root-to-leaf walk each.
//!
//! ```
//! use dyadens::{FittedTree, ModelConfig};
//!
//! let tree = FittedTree::fit(&[0.2, 0.7], ModelConfig::default())?;
//!
//! // Two points this coarse barely beat the uniform prior: the marginal
//! // likelihood of the pair is exactly 5/6.
//! assert!((tree.log_evidence() - (5.0f64 / 6.0).ln()).abs() < 1e-15);
//!
//! // Posterior predictive density, CDF, and a posterior draw.
//! let density = tree.predictive_density(0.21)?;
//! assert!(density > 1.0);
//! assert!(tree.cdf(0.5)? > 0.4);
//! let draws = tree.sample_many(3, 7);
//! assert!(draws.iter().all(|x| (0.0..1.0).contains(x)));
//! # Ok::<(), dyadens::Error>(())
//! ```
//!
//! The [`model`] module exposes the one-shot evaluator and configuration,
//! [`tree`] the incremental structure, [`domains`] encoders that bring
//! cubes, half-lines, the real line, and labeled data onto the unit
//! interval, and [`testkit`] independent slow oracles plus samplers used
//! to validate all of it.

pub mod domains;
pub mod error;
pub mod model;
pub mod testkit;
pub mod tree;

pub use error::{Error, Result};
pub use model::*;
pub use tree::{CellReport, FittedTree, TreeNode, TreeStats};
