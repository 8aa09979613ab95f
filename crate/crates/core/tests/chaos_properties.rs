use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use wickspde_core::chaos::{wick_exp, wick_mul, wick_pow, BasisTag, ChaosField};
use wickspde_core::multiindex::{binomial, IndexSet, MultiIndex};

fn field(set: &Arc<IndexSet>, values: &[f64]) -> ChaosField<f64> {
    let mut f = ChaosField::zero(set.clone(), (), BasisTag::GaussianHermite);
    for (alpha, &v) in set.members().iter().zip(values) {
        f.set(alpha, v).unwrap();
    }
    f
}

fn coefficients(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #[test]
    fn transform_is_multiplicative(
        a in coefficients(15),
        b in coefficients(15),
        z in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        let low = Arc::new(IndexSet::enumerate(2, 4));
        let big = Arc::new(IndexSet::enumerate(4, 4));
        let (f, g) = (field(&low, &a).project(big.clone()), field(&low, &b).project(big.clone()));
        let z: Vec<Complex64> = z.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let lhs = wick_mul(&f, &g, &big).unwrap().hermite_transform_eval(&z);
        let rhs = f.hermite_transform_eval(&z) * g.hermite_transform_eval(&z);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn variance_of_a_sum_of_orthogonal_parts_adds(a in coefficients(10), b in coefficients(10)) {
        let set = Arc::new(IndexSet::enumerate(3, 2));
        let mut x = field(&set, &a);
        let mut y = field(&set, &b);
        // Split the support: x on even positions, y on odd ones.
        for p in 0..set.len() {
            if p % 2 == 0 { y.clear_at(p) } else { x.clear_at(p) }
        }
        let (_, vx) = x.mean_variance();
        let (_, vy) = y.mean_variance();
        let (_, vs) = x.add_scaled(&y, 1.0).unwrap().mean_variance();
        prop_assert!((vs - vx - vy).abs() < 1e-12);
    }
}

#[test]
fn index_set_sizes_are_binomial() {
    for k in 0..5u32 {
        for n in 1..5usize {
            assert_eq!(IndexSet::enumerate(k, n).len() as u64, binomial(n as u64 + k as u64, k as u64).unwrap());
        }
    }
}

#[test]
fn wick_powers_of_a_gaussian_are_hermite_polynomials() {
    // X = H_{ε_1} = ξ, so X^{⋄n} = h_n(ξ) with coefficient 1 at n·ε_1.
    let set = Arc::new(IndexSet::enumerate(5, 1));
    let x = ChaosField::single(set.clone(), &MultiIndex::unit(0), 1.0, BasisTag::GaussianHermite).unwrap();
    let p = wick_pow(&x, 4, &set, 1.0).unwrap();
    assert_eq!(p.coeff(&MultiIndex::scaled_unit(0, 4)), Some(&1.0));
    assert_eq!(p.stored_count(), 1);
}

#[test]
fn wick_exponential_transform_is_exponential() {
    let set = Arc::new(IndexSet::enumerate(12, 2));
    let mut x = ChaosField::zero(set.clone(), (), BasisTag::GaussianHermite);
    x.set(&MultiIndex::unit(0), 0.4).unwrap();
    x.set(&MultiIndex::unit(1), -0.3).unwrap();
    let e = wick_exp(&x, &set, 1.0).unwrap();
    let z = [Complex64::new(0.7, 0.2), Complex64::new(-0.5, 0.1)];
    let expect = (x.hermite_transform_eval(&z)).exp();
    assert!((e.hermite_transform_eval(&z) - expect).norm() < 1e-10);
}

#[test]
fn sample_eval_averages_to_the_mean() {
    // Gauss–Hermite quadrature in each of two dimensions integrates h_α exactly.
    let set = Arc::new(IndexSet::enumerate(3, 2));
    let f = field(&set, &[0.5, -1.0, 2.0, 0.25, 0.75, -0.5, 1.5, 0.1, 0.2, 0.3]);
    let (nodes, weights) = wickspde_core::quadrature::gauss_hermite_normal(4);
    let mut mean = 0.0;
    for (x, wx) in nodes.iter().zip(&weights) {
        for (y, wy) in nodes.iter().zip(&weights) {
            mean += wx * wy * f.sample_eval(&[*x, *y]).unwrap();
        }
    }
    assert!((mean - 0.5).abs() < 1e-12, "{mean}");
}
