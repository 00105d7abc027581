//! Known test densities on [0, 1) with closed-form cdf and inverse cdf.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Named target distributions used by the consistency experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestDistribution {
    /// Normalized inverse-square-root blowup at 1: pdf (1/2)(1-x)^(-1/2).
    Singular,
    /// pdf 2x.
    Linear,
    /// Beta(2,2): pdf 6x(1-x).
    Beta,
    /// All mass uniform on the left half: pdf 2 on [0, 1/2), 0 beyond.
    Step,
}

impl TestDistribution {
    pub const ALL: [TestDistribution; 4] = [
        TestDistribution::Singular,
        TestDistribution::Linear,
        TestDistribution::Beta,
        TestDistribution::Step,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestDistribution::Singular => "singular",
            TestDistribution::Linear => "linear",
            TestDistribution::Beta => "beta",
            TestDistribution::Step => "step",
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == name)
            .ok_or_else(|| Error::UnknownDistribution(name.to_string()))
    }

    pub fn pdf(self, x: f64) -> f64 {
        if !(0.0..1.0).contains(&x) {
            return 0.0;
        }
        match self {
            TestDistribution::Singular => 0.5 / (1.0 - x).sqrt(),
            TestDistribution::Linear => 2.0 * x,
            TestDistribution::Beta => 6.0 * x * (1.0 - x),
            TestDistribution::Step => {
                if x < 0.5 {
                    2.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn cdf(self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        match self {
            TestDistribution::Singular => 1.0 - (1.0 - x).sqrt(),
            TestDistribution::Linear => x * x,
            TestDistribution::Beta => x * x * (3.0 - 2.0 * x),
            TestDistribution::Step => (2.0 * x).min(1.0),
        }
    }

    /// Monotone inverse of the cdf, mapping [0, 1) into [0, 1).
    pub fn inverse_cdf(self, u: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&u));
        let x = match self {
            TestDistribution::Singular => {
                let r = 1.0 - u;
                1.0 - r * r
            }
            TestDistribution::Linear => u.sqrt(),
            TestDistribution::Beta => invert_monotone(|x| self.cdf(x), u),
            TestDistribution::Step => u / 2.0,
        };
        // u extremely close to 1 can round the result up to 1.0; keep the
        // output strictly inside the unit interval.
        x.min(BELOW_ONE)
    }

    /// `n` draws, sorted ascending. Deterministic in `seed`.
    pub fn sample(self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<f64> = (0..n).map(|_| self.inverse_cdf(rng.gen::<f64>())).collect();
        out.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Sorted draws from a named distribution; see [`TestDistribution::sample`].
pub fn sample_test_distribution(dist: TestDistribution, n: usize, seed: u64) -> Vec<f64> {
    dist.sample(n, seed)
}

fn invert_monotone(cdf: impl Fn(f64) -> f64, u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // 64 halvings take the bracket to one ulp; bisection keeps the inverse
    // monotone in u, which matters for sorted sampling.
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::stats::{chi_squared_critical, chi_squared_uniform_bins};

    #[test]
    fn names_round_trip() {
        for d in TestDistribution::ALL {
            assert_eq!(TestDistribution::by_name(d.name()).unwrap(), d);
        }
        assert!(matches!(
            TestDistribution::by_name("cauchy"),
            Err(Error::UnknownDistribution(_))
        ));
    }

    #[test]
    fn cdf_and_inverse_agree() {
        for d in TestDistribution::ALL {
            for i in 0..200 {
                let u = (i as f64 + 0.5) / 200.0;
                let x = d.inverse_cdf(u);
                assert!((0.0..1.0).contains(&x), "{}: inverse({u}) = {x}", d.name());
                assert!(
                    (d.cdf(x) - u).abs() < 1e-9,
                    "{}: cdf(inverse({u})) = {}",
                    d.name(),
                    d.cdf(x)
                );
            }
        }
    }

    #[test]
    fn inverse_stays_inside_the_interval_at_the_edges() {
        for d in TestDistribution::ALL {
            for u in [0.0, 1.0 - f64::EPSILON / 2.0] {
                let x = d.inverse_cdf(u);
                assert!((0.0..1.0).contains(&x), "{}: inverse({u}) = {x}", d.name());
            }
        }
    }

    #[test]
    fn pdf_integrates_to_one() {
        let grid = 200_000;
        for d in TestDistribution::ALL {
            let sum: f64 = (0..grid)
                .map(|i| d.pdf((i as f64 + 0.5) / grid as f64))
                .sum();
            let integral = sum / grid as f64;
            // The singular pdf has an integrable pole at 1; midpoint
            // quadrature converges slowly there.
            let tol = match d {
                TestDistribution::Singular => 2e-3,
                _ => 1e-6,
            };
            assert!(
                (integral - 1.0).abs() < tol,
                "{}: integral {integral}",
                d.name()
            );
        }
    }

    #[test]
    fn sampling_is_deterministic_and_sorted() {
        let a = sample_test_distribution(TestDistribution::Beta, 1000, 7);
        let b = sample_test_distribution(TestDistribution::Beta, 1000, 7);
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        let c = sample_test_distribution(TestDistribution::Beta, 1000, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn step_samples_have_mean_one_quarter() {
        let xs = sample_test_distribution(TestDistribution::Step, 100_000, 11);
        let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        // sd of U[0, 1/2) is 1/(4 sqrt 3); three standard errors.
        let tol = 3.0 / (4.0 * 3.0f64.sqrt() * (xs.len() as f64).sqrt());
        assert!((mean - 0.25).abs() < tol, "mean {mean}");
        assert!(xs.iter().all(|&x| x < 0.5));
    }

    #[test]
    fn samplers_pass_chi_squared_against_their_own_cdf() {
        let bins = 50;
        for (i, d) in TestDistribution::ALL.into_iter().enumerate() {
            let xs = sample_test_distribution(d, 100_000, 100 + i as u64);
            let stat = chi_squared_uniform_bins(&xs, |x| d.cdf(x), bins);
            let critical = chi_squared_critical((bins - 1) as f64, 1e-3);
            assert!(
                stat < critical,
                "{}: chi2 {stat} >= critical {critical}",
                d.name()
            );
        }
    }
}
