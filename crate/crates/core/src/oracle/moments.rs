use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::quadrature::gauss_hermite_normal;

pub const MOMENT_MAX_DEGREE: u32 = 8;
pub const MOMENT_MAX_DIMS: usize = 4;

/// `E[H_α H_β]` by tensor Gauss–Hermite quadrature, with each factor
/// expanded from the explicit monomial formula
/// `h_n(x) = n! Σ_m (−1)^m x^{n−2m} / (m! (n−2m)! 2^m)`.
pub fn gauss_hermite_moment(alpha: &MultiIndex, beta: &MultiIndex) -> Result<f64> {
    let dims = alpha.len().max(beta.len());
    if alpha.degree() > MOMENT_MAX_DEGREE || beta.degree() > MOMENT_MAX_DEGREE || dims > MOMENT_MAX_DIMS {
        return Err(Error::QuadratureBudget(alloc::format!(
            "moment of {alpha} and {beta} exceeds degree {MOMENT_MAX_DEGREE} / {MOMENT_MAX_DIMS} dimensions"
        )));
    }
    let mut value = 1.0;
    for i in 0..dims {
        let (a, b) = (alpha.get(i), beta.get(i));
        let (x, w) = gauss_hermite_normal((a + b) as usize / 2 + 1);
        let coef_a = monomial_coefficients(a);
        let coef_b = monomial_coefficients(b);
        value *= x.iter().zip(&w).map(|(&x, &w)| w * horner(&coef_a, x) * horner(&coef_b, x)).sum::<f64>();
    }
    Ok(value)
}

fn monomial_coefficients(n: u32) -> Vec<f64> {
    let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
    let mut c = alloc::vec![0.0; n as usize + 1];
    for m in 0..=n / 2 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        c[(n - 2 * m) as usize] = sign * fact(n) / (fact(m) * fact(n - 2 * m) * libm::pow(2.0, m as f64));
    }
    c
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(gauss_hermite_moment(&MultiIndex::zero(), &MultiIndex::zero()).unwrap(), 1.0);
        let two = MultiIndex::scaled_unit(0, 2);
        assert!((gauss_hermite_moment(&two, &two).unwrap() - 2.0).abs() < 1e-13);
        assert!(gauss_hermite_moment(&MultiIndex::unit(0), &MultiIndex::unit(1)).unwrap().abs() < 1e-15);
        let big = MultiIndex::new(&[4, 4, 0, 0]);
        assert!((gauss_hermite_moment(&big, &big).unwrap() - 576.0).abs() < 1e-9);
    }

    #[test]
    fn budget() {
        assert!(gauss_hermite_moment(&MultiIndex::scaled_unit(0, 9), &MultiIndex::zero()).is_err());
        assert!(gauss_hermite_moment(&MultiIndex::unit(4), &MultiIndex::zero()).is_err());
    }
}
