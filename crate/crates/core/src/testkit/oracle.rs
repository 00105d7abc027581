//! Brute-force evidence oracle.
//!
//! Enumerates every decision tree (skeleton) over the first m levels and
//! sums prior(skeleton) times the product of 1/w over its split nodes, in
//! exact rational arithmetic. This is the deliberately dumb route: it shares
//! nothing with the recursive evaluator except the definitions, and the two
//! must agree for every dataset and depth.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::ModelConfig;

/// Enumeration is refused above this depth; the skeleton count satisfies
/// S(m+1) = S(m)^2 + 1, i.e. 1, 2, 5, 26, 677, 458330, ...
pub const MAX_ORACLE_DEPTH: u32 = 4;

/// One decision tree: every node either keeps its cell uniform or splits it.
/// Leaves at the depth budget are forced and carry no prior factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Skeleton {
    Uniform,
    Split(Box<Skeleton>, Box<Skeleton>),
}

impl Skeleton {
    /// Prior probability of choosing this skeleton when `depth_budget`
    /// levels of choice remain.
    pub fn prior(&self, depth_budget: u32, split_prior: f64) -> f64 {
        self.prior_rational(depth_budget, &rational_from(split_prior))
            .to_f64()
            .unwrap()
    }

    pub(crate) fn prior_rational(&self, depth_budget: u32, split_prior: &BigRational) -> BigRational {
        match self {
            Skeleton::Uniform => {
                if depth_budget == 0 {
                    // Forced leaf: there was no choice to weigh.
                    BigRational::one()
                } else {
                    BigRational::one() - split_prior
                }
            }
            Skeleton::Split(left, right) => {
                split_prior
                    * left.prior_rational(depth_budget - 1, split_prior)
                    * right.prior_rational(depth_budget - 1, split_prior)
            }
        }
    }

    /// Number of cells in the skeleton, counting internal ones.
    pub fn count_nodes(&self) -> u64 {
        match self {
            Skeleton::Uniform => 1,
            Skeleton::Split(l, r) => 1 + l.count_nodes() + r.count_nodes(),
        }
    }
}

/// All skeletons with up to `depth` levels of splits.
pub fn enumerate_skeletons(depth: u32) -> Result<Vec<Skeleton>> {
    if depth > MAX_ORACLE_DEPTH {
        return Err(Error::OracleDepthTooLarge(depth));
    }
    Ok(enumerate(depth))
}

fn enumerate(budget: u32) -> Vec<Skeleton> {
    let mut out = vec![Skeleton::Uniform];
    if budget > 0 {
        let subs = enumerate(budget - 1);
        for l in &subs {
            for r in &subs {
                out.push(Skeleton::Split(Box::new(l.clone()), Box::new(r.clone())));
            }
        }
    }
    out
}

/// Evidence of `data` (sorted, in [0, 1)) under the depth-m model, summed
/// skeleton by skeleton. Exact up to the final conversion to f64.
pub fn oracle_evidence(data: &[f64], depth: u32, config: &ModelConfig) -> Result<f64> {
    Ok(oracle_evidence_rational(data, depth, config)?.to_f64().unwrap())
}

pub(crate) fn oracle_evidence_rational(
    data: &[f64],
    depth: u32,
    config: &ModelConfig,
) -> Result<BigRational> {
    config.validate()?;
    check_sorted_unit(data)?;
    let skeletons = enumerate_skeletons(depth)?;
    let beta = rational_from(config.split_prior);
    let mut total = BigRational::zero();
    for skeleton in &skeletons {
        let prior = skeleton.prior_rational(depth, &beta);
        total += prior * likelihood(skeleton, data.to_vec());
    }
    Ok(total)
}

/// prod over split nodes of 1/w(n0, n1); uniform cells contribute 1.
fn likelihood(skeleton: &Skeleton, data: Vec<f64>) -> BigRational {
    match skeleton {
        Skeleton::Uniform => BigRational::one(),
        Skeleton::Split(l, r) => {
            let (left, right) = halve(data);
            let w = weight_rational(left.len() as u64, right.len() as u64);
            likelihood(l, left) * likelihood(r, right) / w
        }
    }
}

/// Points at exactly 1/2 go right; both halves are rescaled to [0, 1).
/// The doublings are exact in f64.
fn halve(data: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for x in data {
        if x < 0.5 {
            left.push(2.0 * x);
        } else {
            right.push(2.0 * x - 1.0);
        }
    }
    (left, right)
}

/// w(n0, n1) = 2^-n (n+1)! / (n0! n1!) as an exact ratio.
pub(crate) fn weight_rational(n0: u64, n1: u64) -> BigRational {
    let n = n0 + n1;
    let num = factorial(n + 1);
    let den = factorial(n0) * factorial(n1) * BigInt::from(2).pow(n as u32);
    BigRational::new(num, den)
}

fn factorial(n: u64) -> BigInt {
    let mut f = BigInt::one();
    for i in 2..=n {
        f *= BigInt::from(i);
    }
    f
}

fn rational_from(x: f64) -> BigRational {
    // f64 values are dyadic rationals; the conversion is exact.
    BigRational::from_float(x).expect("finite float")
}

fn check_sorted_unit(data: &[f64]) -> Result<()> {
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
