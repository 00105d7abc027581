//! Goodness-of-fit statistics used by the experiment harness and tests.

/// One-sample Kolmogorov-Smirnov statistic of sorted data against a cdf.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Asymptotic two-sided Kolmogorov-Smirnov critical value at level `alpha`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / (2.0 * n as f64)).sqrt()
}

/// Pearson chi-squared statistic over `bins` equal-probability bins of `cdf`.
pub fn chi_squared_uniform_bins(sorted: &[f64], cdf: impl Fn(f64) -> f64, bins: usize) -> f64 {
    assert!(bins >= 2);
    let mut counts = vec![0u64; bins];
    for &x in sorted {
        let b = ((cdf(x) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let expected = sorted.len() as f64 / bins as f64;
    counts
        .iter()
        .map(|&c| {
            let diff = c as f64 - expected;
            diff * diff / expected
        })
        .sum()
}

/// Upper `alpha` quantile of the chi-squared distribution with `df` degrees
/// of freedom, via the Wilson-Hilferty cube approximation.
pub fn chi_squared_critical(df: f64, alpha: f64) -> f64 {
    let z = normal_upper_quantile(alpha);
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Upper `alpha` quantile of the standard normal (Acklam's rational fit,
/// relative error below 1.2e-9 over the whole range).
pub fn normal_upper_quantile(alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0);
    let p = 1.0 - alpha;

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let tail = |p: f64| {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    if p < P_LOW {
        tail(p)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(1.0 - p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_draws(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        xs
    }

    #[test]
    fn normal_quantiles_match_tables() {
        let cases = [(0.05, 1.6449), (0.01, 2.3263), (0.001, 3.0902), (0.5, 0.0)];
        for (alpha, z) in cases {
            assert!(
                (normal_upper_quantile(alpha) - z).abs() < 1e-3,
                "alpha {alpha}: {}",
                normal_upper_quantile(alpha)
            );
        }
        assert!((normal_upper_quantile(0.975) + 1.9600).abs() < 1e-3);
    }

    #[test]
    fn chi_squared_criticals_match_tables() {
        // Reference values from standard chi-squared tables. The cube
        // approximation loses accuracy below roughly five degrees of
        // freedom, so only moderate df appears here and in callers.
        let cases = [
            (49.0, 1e-3, 85.351),
            (19.0, 0.01, 36.191),
            (9.0, 0.05, 16.919),
        ];
        for (df, alpha, want) in cases {
            let got = chi_squared_critical(df, alpha);
            assert!(
                (got - want).abs() / want < 0.005,
                "df {df} alpha {alpha}: {got}"
            );
        }
    }

    #[test]
    fn ks_statistic_on_a_perfect_grid_is_half_a_cell() {
        let n = 100;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12, "d {d}");
    }

    #[test]
    fn uniform_draws_pass_ks_against_identity() {
        let xs = uniform_draws(10_000, 42);
        let d = ks_statistic(&xs, |x| x);
        assert!(d < ks_critical(xs.len(), 0.01), "d {d}");
    }

    #[test]
    fn shifted_cdf_fails_ks() {
        let xs = uniform_draws(10_000, 42);
        let d = ks_statistic(&xs, |x: f64| x.powf(1.2));
        assert!(d > ks_critical(xs.len(), 0.01), "d {d}");
    }

    #[test]
    fn chi_squared_detects_the_same_mismatch() {
        let xs = uniform_draws(10_000, 43);
        let ok = chi_squared_uniform_bins(&xs, |x| x, 20);
        let bad = chi_squared_uniform_bins(&xs, |x: f64| x.powf(1.2), 20);
        let critical = chi_squared_critical(19.0, 0.01);
        assert!(ok < critical, "ok {ok}");
        assert!(bad > critical, "bad {bad}");
    }

    #[test]
    fn ks_critical_shrinks_with_n() {
        assert!(ks_critical(10_000, 0.01) < ks_critical(100, 0.01));
        let expected = (-(0.005f64).ln() / 2.0).sqrt() / 100.0;
        assert!((ks_critical(10_000, 0.01) - expected).abs() < 1e-12);
    }
}
