//! Prior distribution of the effective partition dimension.
//!
//! Under the infinite recursion over an empty (or singleton) cell, the
//! probability that the tree uses exactly k splits satisfies
//!
//!   a_0 = 1 - b,    a_{k+1} = b * sum_{i=0}^{k} a_i a_{k-i}
//!
//! where b is the split prior. At b = 1/2 these are a_k = C(2k, k) /
//! (2 (k+1) 4^k), with tail a_k ~ k^{-3/2} / (2 sqrt(pi)).

use crate::error::{Error, Result};

/// First `n_terms` coefficients a_0 .. a_{n_terms-1}. O(n_terms^2).
pub fn prior_dim_coeffs(n_terms: usize, split_prior: f64) -> Result<Vec<f64>> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument(
            "prior_dim_coeffs needs at least one term".into(),
        ));
    }
    if !(split_prior > 0.0 && split_prior <= 0.5) {
        return Err(Error::InvalidConfig(format!(
            "split_prior must lie in (0, 1/2], got {split_prior}"
        )));
    }
    Ok(coeffs_unchecked(n_terms, split_prior))
}

// The self-convolution below and the dims convolution in combine() must sum
// in the same index order so that truncated and recursive results agree
// bit for bit.
pub(crate) fn coeffs_unchecked(n_terms: usize, split_prior: f64) -> Vec<f64> {
    let mut a = Vec::with_capacity(n_terms);
    a.push(1.0 - split_prior);
    for k in 0..n_terms - 1 {
        let s: f64 = (0..=k).map(|i| a[i] * a[k - i]).sum();
        a.push(split_prior * s);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn binomial(n: u64, k: u64) -> BigInt {
        let mut num = BigInt::from(1);
        let mut den = BigInt::from(1);
        for i in 0..k {
            num *= BigInt::from(n - i);
            den *= BigInt::from(i + 1);
        }
        num / den
    }

    /// a_k = C(2k, k) / (2 (k+1) 4^k) at split prior 1/2, as an exact ratio.
    fn closed_form(k: u64) -> f64 {
        let num = binomial(2 * k, k);
        let den = BigInt::from(2) * BigInt::from(k + 1) * BigInt::from(4).pow(k as u32);
        BigRational::new(num, den).to_f64().unwrap()
    }

    #[test]
    fn first_seven_coefficients_are_exact_dyadics() {
        let a = prior_dim_coeffs(7, 0.5).unwrap();
        let expected = [
            1.0 / 2.0,
            1.0 / 8.0,
            1.0 / 16.0,
            5.0 / 128.0,
            7.0 / 256.0,
            21.0 / 1024.0,
            33.0 / 2048.0,
        ];
        // Every operation on these dyadic rationals is exact in f64, so the
        // match must be bitwise.
        assert_eq!(a, expected);
    }

    #[test]
    fn matches_central_binomial_closed_form_to_thirty_terms() {
        let a = prior_dim_coeffs(31, 0.5).unwrap();
        for (k, &ak) in a.iter().enumerate() {
            let exact = closed_form(k as u64);
            assert!(
                (ak - exact).abs() <= 1e-12 * exact,
                "a_{k}: got {ak}, closed form {exact}"
            );
        }
    }

    #[test]
    fn tail_decays_like_k_to_minus_three_halves() {
        let a = coeffs_unchecked(1001, 0.5);
        let limit = 0.5 / std::f64::consts::PI.sqrt();
        let k = 1000.0f64;
        let scaled = a[1000] * k.powf(1.5);
        assert!(
            (scaled / limit - 1.0).abs() < 0.02,
            "a_1000 * k^1.5 = {scaled}, limit {limit}"
        );
    }

    #[test]
    fn partial_sums_increase_toward_one() {
        let a = coeffs_unchecked(1001, 0.5);
        let mut sum = 0.0;
        for &ak in &a {
            assert!(ak > 0.0);
            sum += ak;
            assert!(sum < 1.0);
        }
        assert!(1.0 - sum < 0.02, "tail after 1001 terms: {}", 1.0 - sum);
    }

    #[test]
    fn smaller_split_priors_put_more_mass_on_small_trees() {
        let shallow = coeffs_unchecked(8, 0.25);
        let deep = coeffs_unchecked(8, 0.5);
        assert!(shallow[0] > deep[0]);
        assert!((shallow[0] - 0.75).abs() < 1e-15);
        let s: f64 = shallow.iter().sum();
        let d: f64 = deep.iter().sum();
        assert!(s > d);
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        assert!(prior_dim_coeffs(0, 0.5).is_err());
        assert!(prior_dim_coeffs(4, 0.0).is_err());
        assert!(prior_dim_coeffs(4, 0.6).is_err());
    }
}
