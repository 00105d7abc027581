//! Encoders mapping structured sample spaces onto the unit interval.
//!
//! The inference engine works on points in `[0, 1)` and their binary
//! expansions. Everything else is brought into that form here: a point of
//! the d-dimensional cube becomes one interleaved expansion, unbounded
//! lines are squashed by monotone bijections, and a binary class label
//! becomes the leading bit so that the root split separates the classes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tree::FittedTree;

/// Lazy binary expansion of an encoded point.
///
/// Bit `i` of a unit-interval point `x` is `floor(2^(i+1) x) mod 2`; the
/// first `l` bits identify the depth-`l` dyadic cell containing `x`. The
/// stream never ends: once the residual reaches zero it keeps yielding
/// zeros.
#[derive(Debug, Clone)]
pub struct BitStream {
    prefix: Vec<u8>,
    emitted: usize,
    residuals: Vec<f64>,
    next_coord: usize,
}

impl BitStream {
    fn from_residuals(residuals: Vec<f64>) -> Self {
        BitStream {
            prefix: Vec::new(),
            emitted: 0,
            residuals,
            next_coord: 0,
        }
    }

    /// Collapses the first `bits` bits back into a unit-interval value.
    ///
    /// Summation runs from the deepest bit up, halving at each step, so
    /// every intermediate value is a short dyadic and the result is exact
    /// whenever it fits in a double.
    pub fn materialize(self, bits: u32) -> f64 {
        let leading: Vec<u8> = self.take(bits as usize).collect();
        leading
            .iter()
            .rev()
            .fold(0.0, |acc, &bit| (f64::from(bit) + acc) / 2.0)
    }
}

impl Iterator for BitStream {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        if self.emitted < self.prefix.len() {
            let bit = self.prefix[self.emitted];
            self.emitted += 1;
            return Some(bit);
        }
        let coord = self.next_coord;
        self.next_coord = (coord + 1) % self.residuals.len();
        let r = &mut self.residuals[coord];
        let bit = *r >= 0.5;
        *r = if bit { 2.0 * *r - 1.0 } else { 2.0 * *r };
        Some(u8::from(bit))
    }
}

fn check_unit(x: f64) -> Result<f64> {
    if (0.0..1.0).contains(&x) {
        Ok(if x == 0.0 { 0.0 } else { x })
    } else {
        Err(Error::InvalidArgument(format!(
            "point {x} is outside [0, 1)"
        )))
    }
}

/// Binary expansion of a unit-interval point by repeated doubling.
pub fn encode_unit(x: f64) -> Result<BitStream> {
    Ok(BitStream::from_residuals(vec![check_unit(x)?]))
}

/// Interleaved expansion of a point of the d-cube: bit `i` of the output
/// is bit `i / d` of coordinate `i mod d`, so successive depths bisect
/// the coordinate directions in cyclic order.
pub fn encode_cube(point: &[f64]) -> Result<BitStream> {
    if point.is_empty() {
        return Err(Error::InvalidArgument(
            "a cube point needs at least one coordinate".into(),
        ));
    }
    let residuals = point
        .iter()
        .map(|&c| check_unit(c))
        .collect::<Result<Vec<f64>>>()?;
    Ok(BitStream::from_residuals(residuals))
}

/// Splits an interleaved cube expansion back into `d` coordinates, reading
/// `bits` bits in total.
pub fn decode_cube(x: f64, d: usize, bits: u32) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "a cube point needs at least one coordinate".into(),
        ));
    }
    let stream = encode_unit(x)?;
    let mut per_coord = vec![Vec::new(); d];
    for (i, bit) in stream.take(bits as usize).enumerate() {
        per_coord[i % d].push(bit);
    }
    Ok(per_coord
        .into_iter()
        .map(|coord_bits| {
            coord_bits
                .iter()
                .rev()
                .fold(0.0, |acc, &bit| (f64::from(bit) + acc) / 2.0)
        })
        .collect())
}

/// Prepends the class label to an observation's expansion, so the root
/// split of the encoded space separates the two classes and each half is
/// a scaled copy of the observation space.
pub fn encode_classified(observation: BitStream, class: bool) -> BitStream {
    let mut stream = observation;
    stream.prefix.insert(stream.emitted, u8::from(class));
    stream
}

/// Squashes `(1, ∞]` onto `[0, 1)` by `y ↦ 1/y`. Strictly decreasing.
pub fn compactify_positive(y: f64) -> Result<f64> {
    if y > 1.0 {
        Ok(1.0 / y)
    } else {
        Err(Error::InvalidArgument(format!(
            "point {y} is not above 1"
        )))
    }
}

/// Inverse of [`compactify_positive`].
pub fn decompactify_positive(x: f64) -> Result<f64> {
    if x > 0.0 && x < 1.0 {
        Ok(1.0 / x)
    } else {
        Err(Error::InvalidArgument(format!(
            "point {x} is outside (0, 1)"
        )))
    }
}

/// Squashes the real line onto `(0, 1)` by the strictly increasing inverse
/// of `x ↦ (2x − 1) / (x(1 − x))`.
///
/// Each sign gets its own algebraic form of the same root so that no branch
/// subtracts nearly equal quantities.
pub fn compactify_real(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "point {y} is not a finite real"
        )));
    }
    let s = (y * y + 4.0).sqrt();
    if y >= 0.0 {
        Ok((y + s) / (y + 2.0 + s))
    } else {
        Ok(2.0 / (2.0 - y + s))
    }
}

/// Inverse of [`compactify_real`]: the map `x ↦ (2x − 1) / (x(1 − x))`.
pub fn decompactify_real(x: f64) -> Result<f64> {
    if x > 0.0 && x < 1.0 {
        Ok((2.0 * x - 1.0) / (x * (1.0 - x)))
    } else {
        Err(Error::InvalidArgument(format!(
            "point {x} is outside (0, 1)"
        )))
    }
}

/// Posterior probability that `observation` carries class 1, for a tree
/// fitted on class-encoded data.
///
/// Both class encodings are scored by their evidence gain and combined by
/// the logistic of the difference; expansions are truncated at the tree's
/// depth bound. An empty tree returns exactly 1/2.
pub fn classify_posterior(tree: &FittedTree, observation: BitStream) -> Result<f64> {
    let depth = tree.config().max_depth;
    let as_zero = encode_classified(observation.clone(), false).materialize(depth);
    let as_one = encode_classified(observation, true).materialize(depth);
    let gap = tree.added_log_evidence(as_one)? - tree.added_log_evidence(as_zero)?;
    Ok(logistic(gap))
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Which sample space the raw data lives in, and hence which encoder maps
/// records onto the unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainSpec {
    /// Points already in `[0, 1)`; the encoder is the identity.
    Unit,
    /// Reals above 1, squashed by `y ↦ 1/y`.
    Positive,
    /// The whole real line, squashed by the rational bijection.
    Real,
    /// The d-dimensional unit cube, bit-interleaved.
    Cube(usize),
    /// A unit-interval observation with a trailing 0/1 class label.
    Classified,
}

impl DomainSpec {
    /// Number of numeric fields in one input record.
    pub fn record_len(&self) -> usize {
        match self {
            DomainSpec::Unit | DomainSpec::Positive | DomainSpec::Real => 1,
            DomainSpec::Cube(d) => *d,
            DomainSpec::Classified => 2,
        }
    }

    /// Maps one raw record onto the unit interval, truncating the encoded
    /// expansion at `max_depth` bits where an expansion is involved.
    pub fn encode_record(&self, record: &[f64], max_depth: u32) -> Result<f64> {
        if record.len() != self.record_len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} field(s) per record in the {} domain, got {}",
                self.record_len(),
                self,
                record.len()
            )));
        }
        match self {
            DomainSpec::Unit => check_unit(record[0]),
            DomainSpec::Positive => compactify_positive(record[0]),
            DomainSpec::Real => compactify_real(record[0]),
            DomainSpec::Cube(1) => check_unit(record[0]),
            DomainSpec::Cube(_) => Ok(encode_cube(record)?.materialize(max_depth)),
            DomainSpec::Classified => {
                let class = match record[1] {
                    c if c == 0.0 => false,
                    c if c == 1.0 => true,
                    c => {
                        return Err(Error::InvalidArgument(format!(
                            "class label must be 0 or 1, got {c}"
                        )))
                    }
                };
                let obs = encode_unit(record[0])?;
                Ok(encode_classified(obs, class).materialize(max_depth))
            }
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Unit => write!(f, "unit"),
            DomainSpec::Positive => write!(f, "positive"),
            DomainSpec::Real => write!(f, "real"),
            DomainSpec::Cube(d) => write!(f, "cube:{d}"),
            DomainSpec::Classified => write!(f, "classify"),
        }
    }
}

impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(DomainSpec::Unit),
            "positive" => Ok(DomainSpec::Positive),
            "real" => Ok(DomainSpec::Real),
            "classify" => Ok(DomainSpec::Classified),
            other => {
                if let Some(dim) = other.strip_prefix("cube:") {
                    let d: usize = dim.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad cube dimension {dim:?}"))
                    })?;
                    if d == 0 {
                        return Err(Error::InvalidArgument(
                            "a cube needs at least one dimension".into(),
                        ));
                    }
                    return Ok(DomainSpec::Cube(d));
                }
                Err(Error::InvalidArgument(format!("unknown domain {other:?}")))
            }
        }
    }
}
