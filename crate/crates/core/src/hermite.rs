//! Hermite polynomials, Hermite functions and first-order Charlier functionals.
//!
//! Polynomials `h_n` are the probabilists' family (`h₀ = 1`, `h₁ = x`,
//! `h_{n+1} = x h_n − n h_{n−1}`). Hermite functions are 1-based:
//! `ζ_n(x) = π^{-1/4} ((n−1)!)^{-1/2} e^{-x²/2} h_{n−1}(√2 x)`, evaluated by
//! the normalised three-term recurrence so that no factorial is ever formed.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::multiindex::{IndexSet, MultiIndex};

/// `π^{-1/4}`.
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

pub fn hermite_poly(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[h_0(x), …, h_max(x)]`.
pub fn hermite_poly_table(max: u32, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max as usize + 1);
    out.push(1.0);
    if max >= 1 {
        out.push(x);
    }
    for k in 1..max as usize {
        let next = x * out[k] - k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

/// `ζ_n(x)` for `n ≥ 1`; `n = 0` is outside the family and returns 0.
pub fn hermite_fn(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut prev = 0.0;
    let mut cur = PI_POW_NEG_QUARTER * libm::exp(-0.5 * x * x);
    for m in 1..n {
        let mf = m as f64;
        let next = x * libm::sqrt(2.0 / mf) * cur - libm::sqrt((mf - 1.0) / mf) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[ζ_1(x), …, ζ_max(x)]` (entry `i` holds `ζ_{i+1}`).
pub fn hermite_fn_table(max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max);
    if max == 0 {
        return out;
    }
    out.push(PI_POW_NEG_QUARTER * libm::exp(-0.5 * x * x));
    if max >= 2 {
        out.push(SQRT_2 * x * out[0]);
    }
    for m in 2..max {
        let mf = m as f64;
        let next = x * libm::sqrt(2.0 / mf) * out[m - 1] - libm::sqrt((mf - 1.0) / mf) * out[m - 2];
        out.push(next);
    }
    out
}

/// `[b_1(x), …, b_max(x)]` with `b_n(x) = ∫₀^x ζ_n(s) ds` (signed for `x < 0`).
///
/// Uses the ladder identity `ζ_n' = √((n−1)/2) ζ_{n−1} − √(n/2) ζ_{n+1}`,
/// which integrates to a contracting forward recurrence.
pub fn hermite_fn_integral_table(max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max);
    if max == 0 {
        return out;
    }
    let zx = hermite_fn_table(max, x);
    let z0 = hermite_fn_table(max, 0.0);
    out.push(PI_POW_NEG_QUARTER * libm::sqrt(PI / 2.0) * libm::erf(x / SQRT_2));
    if max >= 2 {
        out.push(SQRT_2 * PI_POW_NEG_QUARTER * (1.0 - libm::exp(-0.5 * x * x)));
    }
    for m in 2..max {
        let mf = m as f64;
        let next = libm::sqrt((mf - 1.0) / mf) * out[m - 2]
            - libm::sqrt(2.0 / mf) * (zx[m - 1] - z0[m - 1]);
        out.push(next);
    }
    out
}

/// First-order Charlier functionals: `C_0 = 1`, `C_{ε_k}(ω) = ⟨ω, η_k⟩ − ∫η_k`.
pub fn charlier_low(alpha: &MultiIndex, pairing: f64, compensator: f64) -> Result<f64> {
    match alpha.degree() {
        0 => Ok(1.0),
        1 => Ok(pairing - compensator),
        d => Err(Error::UnsupportedCharlierOrder(d)),
    }
}

/// Tensor Hermite basis `η_j` of `L²(ℝ^d)` under the graded ordering of
/// `d`-dimensional multi-indices, with tables cached per grid axis.
#[derive(Debug, Clone)]
pub struct BasisEvaluator {
    dim: usize,
    order: IndexSet,
    max_order: usize,
    tables: Vec<Vec<Vec<f64>>>,
}

impl BasisEvaluator {
    /// Covers the first `count` basis functions of `ℝ^dim`.
    pub fn new(dim: usize, count: usize) -> Self {
        let order = ordering_covering(dim, count);
        let max_order = order
            .members()
            .iter()
            .take(count)
            .flat_map(|m| (0..dim).map(move |i| m.get(i)))
            .max()
            .unwrap_or(0) as usize
            + 1;
        Self { dim, order, max_order, tables: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn ordering(&self) -> &IndexSet {
        &self.order
    }

    /// Caches `ζ_1..ζ_max` at the chart images of every node of `grid`;
    /// `chart(axis, x)` maps a physical coordinate to `ℝ`.
    pub fn cache_grid(&mut self, grid: &GridSpec, chart: impl Fn(usize, f64) -> f64) {
        assert_eq!(grid.dim(), self.dim, "basis dimension differs from grid dimension");
        self.tables = grid
            .axes()
            .iter()
            .enumerate()
            .map(|(ax, a)| {
                (0..a.nodes).map(|i| hermite_fn_table(self.max_order, chart(ax, a.coordinate(i)))).collect()
            })
            .collect();
    }

    /// Cached `η_j` at the node with per-axis indices `idx` (1-based `j`).
    pub fn cached(&self, j: usize, idx: &[usize]) -> Result<f64> {
        let alpha = self.alpha(j)?;
        Ok((0..self.dim).map(|ax| self.tables[ax][idx[ax]][alpha.get(ax) as usize]).product())
    }

    pub fn alpha(&self, j: usize) -> Result<&MultiIndex> {
        if j == 0 {
            return Err(Error::BasisOutOfRange { position: 0, available: self.order.len() });
        }
        self.order
            .get(j - 1)
            .ok_or(Error::BasisOutOfRange { position: j, available: self.order.len() })
    }

    pub fn eval(&self, j: usize, x: &[f64]) -> Result<f64> {
        tensor_eta(j, x, &self.order)
    }
}

/// `η_j(x) = Π_i ζ_{α_i + 1}(x_i)` where `α` is the `j`-th (1-based) member
/// of `order`, an enumeration of `x.len()`-dimensional multi-indices.
pub fn tensor_eta(j: usize, x: &[f64], order: &IndexSet) -> Result<f64> {
    if order.max_dims() != x.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "point has {} coordinates but the ordering enumerates {}-dimensional indices",
            x.len(),
            order.max_dims()
        )));
    }
    let alpha = j
        .checked_sub(1)
        .and_then(|p| order.get(p))
        .ok_or(Error::BasisOutOfRange { position: j, available: order.len() })?;
    Ok(x.iter().enumerate().map(|(i, &xi)| hermite_fn(alpha.get(i) as usize + 1, xi)).product())
}

/// Smallest graded ordering of `dim`-dimensional indices with `≥ count` members.
pub fn ordering_covering(dim: usize, count: usize) -> IndexSet {
    let mut k = 0;
    loop {
        let s = IndexSet::enumerate(k, dim);
        if s.len() >= count {
            return s;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_values() {
        assert_eq!(hermite_poly(0, 7.3), 1.0);
        assert_eq!(hermite_poly(2, 1.0), 0.0);
        assert_eq!(hermite_poly(3, 2.0), 2.0);
        let t = hermite_poly_table(6, 0.37);
        for (n, v) in t.iter().enumerate() {
            assert_eq!(*v, hermite_poly(n as u32, 0.37));
        }
    }

    #[test]
    fn closed_forms_agree_with_recurrence() {
        let mut x = -3.1;
        for _ in 0..100 {
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
            assert!(rel(hermite_poly(2, x), x * x - 1.0) < 1e-10);
            assert!(rel(hermite_poly(3, x), x * x * x - 3.0 * x) < 1e-10);
            assert!(rel(hermite_poly(4, x), x.powi(4) - 6.0 * x * x + 3.0) < 1e-10);
            x += 0.0617;
        }
    }

    #[test]
    fn hermite_function_values() {
        assert!((hermite_fn(1, 0.0) - 0.751_125_5).abs() < 1e-7);
        assert!((PI_POW_NEG_QUARTER - libm::pow(PI, -0.25)).abs() < 1e-16);
        assert_eq!(hermite_fn(2, 0.0), 0.0);
        // explicit formula for small n
        for &x in &[-1.3, 0.2, 2.5] {
            let direct = |n: usize| {
                let f: f64 = (1..n).map(|k| k as f64).product();
                libm::pow(PI, -0.25) / libm::sqrt(f)
                    * libm::exp(-0.5 * x * x)
                    * hermite_poly(n as u32 - 1, SQRT_2 * x)
            };
            for n in 1..=8 {
                assert!((hermite_fn(n, x) - direct(n)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn table_matches_direct() {
        let t = hermite_fn_table(200, 3.7);
        for (i, &v) in t.iter().enumerate() {
            let d = hermite_fn(i + 1, 3.7);
            assert!((v - d).abs() <= 1e-13 * d.abs().max(1e-300));
        }
    }

    #[test]
    fn decay_outside_turning_point() {
        for n in 1..=100usize {
            let x0 = libm::sqrt(2.0 * n as f64) + 8.0;
            for &x in &[x0 + 0.01, x0 + 1.0, -(x0 + 0.5)] {
                assert!(hermite_fn(n, x).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn charlier() {
        assert_eq!(charlier_low(&MultiIndex::zero(), 9.0, 1.0).unwrap(), 1.0);
        assert!((charlier_low(&MultiIndex::unit(0), 2.5, 0.7).unwrap() - 1.8).abs() < 1e-15);
        assert_eq!(
            charlier_low(&MultiIndex::scaled_unit(0, 2), 2.5, 0.7),
            Err(Error::UnsupportedCharlierOrder(2))
        );
    }

    #[test]
    fn tensor_basis() {
        let o1 = IndexSet::enumerate(10, 1);
        for j in 1..=10 {
            assert_eq!(tensor_eta(j, &[0.4], &o1).unwrap(), hermite_fn(j, 0.4));
        }
        let o2 = IndexSet::enumerate(3, 2);
        let v = tensor_eta(1, &[0.0, 0.0], &o2).unwrap();
        assert!((v - 1.0 / libm::sqrt(PI)).abs() < 1e-15);
        assert!(tensor_eta(0, &[0.0, 0.0], &o2).is_err());
        assert!(tensor_eta(11, &[0.0, 0.0], &o2).is_err());
    }

    #[test]
    fn cached_tables() {
        let grid = GridSpec::plane(8, 4.0, 4, 2.0).unwrap();
        let mut b = BasisEvaluator::new(2, 6);
        b.cache_grid(&grid, |_, x| 1.5 * x);
        for flat in 0..grid.len() {
            let idx = grid.unflatten(flat);
            let c = grid.coordinates(flat);
            for j in 1..=6 {
                let direct = b.eval(j, &[1.5 * c[0], 1.5 * c[1]]).unwrap();
                let cached = b.cached(j, &idx[..2]).unwrap();
                assert!((direct - cached).abs() <= 1e-13 * direct.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn integral_recurrence_matches_simpson() {
        for &x in &[-0.9, 0.3, 1.0, 2.2] {
            let tab = hermite_fn_integral_table(60, x);
            for n in [1usize, 2, 3, 7, 30, 60] {
                let m = 4000;
                let h = x / m as f64;
                let mut s = hermite_fn(n, 0.0) + hermite_fn(n, x);
                for i in 1..m {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    s += w * hermite_fn(n, i as f64 * h);
                }
                s *= h / 3.0;
                assert!((tab[n - 1] - s).abs() < 1e-10, "n={n} x={x}");
            }
        }
    }
}
