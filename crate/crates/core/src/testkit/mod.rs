//! Independent implementations and instrumentation used to check the fast
//! engine: an exact-rational enumeration oracle, a finite-depth reference
//! recursion, known sampling distributions, and goodness-of-fit statistics.
//!
//! Everything here favors obviousness over speed. The oracle enumerates
//! every partition shape explicitly and sums exact rationals, so it only
//! works for tiny depth budgets, but there is nothing to get subtly wrong.

mod dist;
mod experiment;
mod oracle;
mod reference;
pub mod stats;

pub use dist::{sample_test_distribution, TestDistribution};
pub use experiment::{consistency_experiment, ExperimentReport, SizeReport};
pub use oracle::{enumerate_skeletons, oracle_evidence, Skeleton, MAX_ORACLE_DEPTH};
pub use reference::finite_depth_evaluate;
