//! Truncated chaos fields and the Wick algebra on them.
//!
//! A [`ChaosField`] stores coefficients `a_α` for every `α` in an
//! [`IndexSet`], densely by position with `None` meaning zero. Coefficients
//! live in one of four spaces (real/complex scalars, real/complex grid
//! functions) captured by the [`Coefficient`] trait; products of grid
//! coefficients are nodal.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::hermite::hermite_poly_table;
use crate::multiindex::{IndexSet, MultiIndex};
use crate::par::map_indexed;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientKind {
    RealScalar,
    ComplexScalar,
    RealGrid,
    ComplexGrid,
}

impl CoefficientKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::RealScalar => "real-scalar",
            Self::ComplexScalar => "complex-scalar",
            Self::RealGrid => "real-grid",
            Self::ComplexGrid => "complex-grid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::RealScalar, Self::ComplexScalar, Self::RealGrid, Self::ComplexGrid]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisTag {
    GaussianHermite,
    PoissonCharlier,
}

impl BasisTag {
    pub fn name(self) -> &'static str {
        match self {
            Self::GaussianHermite => "gaussian-hermite",
            Self::PoissonCharlier => "poisson-charlier",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian-hermite" => Some(Self::GaussianHermite),
            "poisson-charlier" => Some(Self::PoissonCharlier),
            _ => None,
        }
    }

    pub fn toggled(self) -> Self {
        match self {
            Self::GaussianHermite => Self::PoissonCharlier,
            Self::PoissonCharlier => Self::GaussianHermite,
        }
    }
}

/// A coefficient space `V` for chaos expansions.
pub trait Coefficient: Clone + PartialEq + Debug + Send + Sync {
    /// Shape information needed to build a zero (the grid, for grid values).
    type Space: Clone + PartialEq + Debug + Send + Sync;
    type Real: Coefficient<Space = Self::Space>;
    type Complex: Coefficient<Space = Self::Space>;
    const KIND: CoefficientKind;

    fn zero(space: &Self::Space) -> Self;
    fn space(&self) -> Self::Space;
    fn add_assign(&mut self, rhs: &Self);
    fn add_scaled(&mut self, rhs: &Self, s: f64);
    fn scale(&mut self, s: f64);
    /// `self += a·b`, nodal for grid values.
    fn add_product(&mut self, a: &Self, b: &Self);
    /// `‖·‖²_V` (grid values use the grid `L²` norm).
    fn norm_sq(&self) -> f64;
    /// `acc += s·|x|²`, nodal for grid values.
    fn add_modulus_sq(acc: &mut Self::Real, x: &Self, s: f64);
    fn conj(&self) -> Self;
    /// Nodal exponential.
    fn exp(&self) -> Self;
    fn complexify(&self) -> Self::Complex;
    /// `acc += c·x`.
    fn add_complex_scaled(acc: &mut Self::Complex, x: &Self, c: Complex64);
    /// Collapses a complex value back into this space (drops imaginary parts
    /// for real spaces).
    fn from_complex(c: &Self::Complex) -> Self;

    fn product(a: &Self, b: &Self) -> Self {
        let mut out = Self::zero(&a.space());
        out.add_product(a, b);
        out
    }
}

impl<S: Scalar> Coefficient for S {
    type Space = ();
    type Real = f64;
    type Complex = Complex64;
    const KIND: CoefficientKind =
        if S::IS_COMPLEX { CoefficientKind::ComplexScalar } else { CoefficientKind::RealScalar };

    fn zero(_: &()) -> Self {
        S::zero()
    }
    fn space(&self) {}
    fn add_assign(&mut self, rhs: &Self) {
        *self += *rhs;
    }
    fn add_scaled(&mut self, rhs: &Self, s: f64) {
        *self += rhs.scale(s);
    }
    fn scale(&mut self, s: f64) {
        *self = Scalar::scale(*self, s);
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += *a * *b;
    }
    fn norm_sq(&self) -> f64 {
        self.norm_sqr()
    }
    fn add_modulus_sq(acc: &mut f64, x: &Self, s: f64) {
        *acc += s * x.norm_sqr();
    }
    fn conj(&self) -> Self {
        Scalar::conj(*self)
    }
    fn exp(&self) -> Self {
        Scalar::exp(*self)
    }
    fn complexify(&self) -> Complex64 {
        self.to_complex()
    }
    fn add_complex_scaled(acc: &mut Complex64, x: &Self, c: Complex64) {
        *acc += x.to_complex() * c;
    }
    fn from_complex(c: &Complex64) -> Self {
        S::from_complex(*c)
    }
}

impl<S: Scalar> Coefficient for GridFunction<S> {
    type Space = GridSpec;
    type Real = GridFunction<f64>;
    type Complex = GridFunction<Complex64>;
    const KIND: CoefficientKind =
        if S::IS_COMPLEX { CoefficientKind::ComplexGrid } else { CoefficientKind::RealGrid };

    fn zero(space: &GridSpec) -> Self {
        GridFunction::zeros(*space)
    }
    fn space(&self) -> GridSpec {
        *self.grid()
    }
    fn add_assign(&mut self, rhs: &Self) {
        for (a, &b) in self.data_mut().iter_mut().zip(rhs.data()) {
            *a += b;
        }
    }
    fn add_scaled(&mut self, rhs: &Self, s: f64) {
        for (a, &b) in self.data_mut().iter_mut().zip(rhs.data()) {
            *a += Scalar::scale(b, s);
        }
    }
    fn scale(&mut self, s: f64) {
        for a in self.data_mut() {
            *a = Scalar::scale(*a, s);
        }
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        for ((o, &x), &y) in self.data_mut().iter_mut().zip(a.data()).zip(b.data()) {
            *o += x * y;
        }
    }
    fn norm_sq(&self) -> f64 {
        GridFunction::norm_sq(self)
    }
    fn add_modulus_sq(acc: &mut GridFunction<f64>, x: &Self, s: f64) {
        for (o, &v) in acc.data_mut().iter_mut().zip(x.data()) {
            *o += s * v.norm_sqr();
        }
    }
    fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }
    fn exp(&self) -> Self {
        self.map(|v| v.exp())
    }
    fn complexify(&self) -> GridFunction<Complex64> {
        self.to_complex()
    }
    fn add_complex_scaled(acc: &mut GridFunction<Complex64>, x: &Self, c: Complex64) {
        for (o, &v) in acc.data_mut().iter_mut().zip(x.data()) {
            *o += v.to_complex() * c;
        }
    }
    fn from_complex(c: &GridFunction<Complex64>) -> Self {
        c.map(S::from_complex)
    }
}

/// Selects the test-function (`+`) or distribution (`−`) Hida–Kondratiev norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `Σ ‖a_α‖² (α!)^{1+ρ} (2ℕ)^{qα}`.
    Test,
    /// `Σ ‖a_α‖² (α!)^{1−ρ} (2ℕ)^{−qα}`.
    Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosField<C: Coefficient> {
    index_set: Arc<IndexSet>,
    basis: BasisTag,
    space: C::Space,
    coeffs: Vec<Option<C>>,
}

impl<C: Coefficient> ChaosField<C> {
    pub fn zero(index_set: Arc<IndexSet>, space: C::Space, basis: BasisTag) -> Self {
        let coeffs = alloc::vec![None; index_set.len()];
        Self { index_set, basis, space, coeffs }
    }

    /// The deterministic field `value·1`.
    pub fn deterministic(index_set: Arc<IndexSet>, value: C, basis: BasisTag) -> Self {
        let mut f = Self::zero(index_set, value.space(), basis);
        f.coeffs[0] = Some(value);
        f
    }

    /// `value·H_α`.
    pub fn single(index_set: Arc<IndexSet>, alpha: &MultiIndex, value: C, basis: BasisTag) -> Result<Self> {
        let mut f = Self::zero(index_set, value.space(), basis);
        f.set(alpha, value)?;
        Ok(f)
    }

    pub fn index_set(&self) -> &Arc<IndexSet> {
        &self.index_set
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn space(&self) -> &C::Space {
        &self.space
    }

    pub fn kind(&self) -> CoefficientKind {
        C::KIND
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<&C> {
        self.index_set.position(alpha).and_then(|p| self.coeffs[p].as_ref())
    }

    pub fn coeff_at(&self, position: usize) -> Option<&C> {
        self.coeffs.get(position).and_then(Option::as_ref)
    }

    pub fn coeff_or_zero(&self, alpha: &MultiIndex) -> C {
        self.coeff(alpha).cloned().unwrap_or_else(|| C::zero(&self.space))
    }

    pub fn set(&mut self, alpha: &MultiIndex, value: C) -> Result<()> {
        let p = self
            .index_set
            .position(alpha)
            .ok_or_else(|| Error::NotInIndexSet(alloc::format!("{alpha}")))?;
        self.set_at(p, value)
    }

    pub fn set_at(&mut self, position: usize, value: C) -> Result<()> {
        if value.space() != self.space {
            return Err(Error::SpaceMismatch);
        }
        self.coeffs[position] = Some(value);
        Ok(())
    }

    pub fn clear_at(&mut self, position: usize) {
        self.coeffs[position] = None;
    }

    /// Iterates over stored coefficients as `(position, α, a_α)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &MultiIndex, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(move |(p, c)| c.as_ref().map(|c| (p, &self.index_set.members()[p], c)))
    }

    pub fn stored_count(&self) -> usize {
        self.coeffs.iter().filter(|c| c.is_some()).count()
    }

    /// Highest degree among stored coefficients (0 for the zero field).
    pub fn degree(&self) -> u32 {
        self.iter().map(|(_, a, _)| a.degree()).max().unwrap_or(0)
    }

    pub fn with_basis(mut self, basis: BasisTag) -> Self {
        self.basis = basis;
        self
    }

    pub fn map<D: Coefficient>(&self, space: D::Space, f: impl Fn(&C) -> D) -> ChaosField<D> {
        ChaosField {
            index_set: self.index_set.clone(),
            basis: self.basis,
            space,
            coeffs: self.coeffs.iter().map(|c| c.as_ref().map(&f)).collect(),
        }
    }

    /// Re-expresses the field over another index set, dropping members that
    /// are not in `target`.
    pub fn project(&self, target: Arc<IndexSet>) -> Self {
        let mut out = Self::zero(target.clone(), self.space.clone(), self.basis);
        for (_, alpha, c) in self.iter() {
            if let Some(p) = target.position(alpha) {
                out.coeffs[p] = Some(c.clone());
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(self.space.clone(), |c| {
            let mut c = c.clone();
            c.scale(s);
            c
        })
    }

    /// `self + s·other`; both must share index set, space and basis.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        self.check_compatible(other)?;
        if *self.index_set != *other.index_set {
            return Err(Error::IndexSetMismatch(alloc::format!(
                "{} vs {}",
                self.index_set.header(),
                other.index_set.header()
            )));
        }
        let mut out = self.clone();
        for (p, _, c) in other.iter() {
            match &mut out.coeffs[p] {
                Some(a) => a.add_scaled(c, s),
                slot @ None => {
                    let mut v = c.clone();
                    v.scale(s);
                    *slot = Some(v);
                }
            }
        }
        Ok(out)
    }

    /// `ψ* = Σ conj(a_α) H_α`.
    pub fn conj(&self) -> Self {
        self.map(self.space.clone(), C::conj)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Gaussian ↔ Poisson correspondence: coefficients are kept, the basis
    /// tag is toggled. Involutive.
    pub fn poisson_correspondence(&self) -> Self {
        self.clone().with_basis(self.basis.toggled())
    }

    /// `Σ_α a_α z^α` for complex `z` (entries past `N` are ignored).
    pub fn hermite_transform_eval(&self, z: &[Complex64]) -> C::Complex {
        assert!(z.len() >= self.index_set.max_dims(), "z has fewer entries than the chaos dimension");
        let mut acc = <C::Complex as Coefficient>::zero(&self.space);
        for (_, alpha, c) in self.iter() {
            C::add_complex_scaled(&mut acc, c, alpha.monomial(z, Complex64::new(1.0, 0.0)));
        }
        acc
    }

    /// `Σ_α a_α z^α` for real `z`, staying in the coefficient space.
    pub fn hermite_transform_real(&self, z: &[f64]) -> C {
        assert!(z.len() >= self.index_set.max_dims(), "z has fewer entries than the chaos dimension");
        let mut acc = C::zero(&self.space);
        for (_, alpha, c) in self.iter() {
            acc.add_scaled(c, alpha.monomial(z, 1.0));
        }
        acc
    }

    /// Hida–Kondratiev norm with smoothness `ρ ∈ [−1, 1]` and order `q ≥ 0`.
    pub fn hk_norm(&self, rho: f64, q: u32, kind: NormKind) -> Result<f64> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParameter(alloc::format!("rho = {rho} outside [-1, 1]")));
        }
        let mut sum = 0.0;
        for (_, alpha, c) in self.iter() {
            let fact = alpha.factorial()? as f64;
            let weight = alpha.weight()? as f64;
            let w = match kind {
                NormKind::Test => libm::pow(fact, 1.0 + rho) * libm::pow(weight, q as f64),
                NormKind::Distribution => libm::pow(fact, 1.0 - rho) * libm::pow(weight, -(q as f64)),
            };
            if !w.is_finite() {
                return Err(Error::Overflow("Hida-Kondratiev weight"));
            }
            sum += c.norm_sq() * w;
        }
        Ok(libm::sqrt(sum))
    }

    /// `(E F, Var F) = (a_0, Σ_{α≠0} α! |a_α|²)`, nodal for grid values.
    pub fn mean_variance(&self) -> (C, C::Real) {
        let mean = self.coeff_at(0).cloned().unwrap_or_else(|| C::zero(&self.space));
        let mut var = <C::Real as Coefficient>::zero(&self.space);
        for (p, alpha, c) in self.iter() {
            if p == 0 {
                continue;
            }
            C::add_modulus_sq(&mut var, c, factorial_f64(alpha));
        }
        (mean, var)
    }

    /// Pathwise value `Σ_α a_α Π_j h_{α_j}(ξ_j)`.
    pub fn sample_eval(&self, xi: &[f64]) -> Result<C> {
        if self.basis != BasisTag::GaussianHermite {
            return Err(Error::BasisMismatch);
        }
        let n = self.index_set.max_dims();
        if xi.len() < n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} Gaussian draws for a {n}-dimensional chaos",
                xi.len()
            )));
        }
        let k = self.index_set.max_degree();
        let tables: Vec<Vec<f64>> = xi[..n].iter().map(|&x| hermite_poly_table(k, x)).collect();
        let mut acc = C::zero(&self.space);
        for (_, alpha, c) in self.iter() {
            let w: f64 = (0..alpha.len()).map(|j| tables[j][alpha.get(j) as usize]).product();
            acc.add_scaled(c, w);
        }
        Ok(acc)
    }

    /// `Σ_{α≠0} |z^α|² (2ℕ)^{qα}` over the index set: the quantity whose
    /// smallness defines the `B_q(δ)` neighbourhoods. Reported only.
    pub fn bq_radius_sq(index_set: &IndexSet, z: &[Complex64], q: u32) -> Result<f64> {
        let mut s = 0.0;
        for alpha in index_set.members().iter().skip(1) {
            let m = alpha.monomial(z, Complex64::new(1.0, 0.0)).norm_sqr();
            s += m * libm::pow(alpha.weight()? as f64, q as f64);
        }
        Ok(s)
    }
}

impl<S: Scalar> ChaosField<GridFunction<S>> {
    /// `Cov(F(x_i), F(x_j)) = Σ_{α≠0} α! a_α(x_i) conj(a_α(x_j))` at node pairs.
    pub fn covariance(&self, i: usize, j: usize) -> S {
        let mut acc = S::zero();
        for (p, alpha, c) in self.iter() {
            if p == 0 {
                continue;
            }
            acc += (c.data()[i] * c.data()[j].conj()).scale(factorial_f64(alpha));
        }
        acc
    }
}

pub(crate) fn factorial_f64(alpha: &MultiIndex) -> f64 {
    alpha
        .entries()
        .iter()
        .map(|&a| (2..=a).fold(1.0, |acc, m| acc * m as f64))
        .product()
}

/// `F ⋄ G` projected onto `target`.
pub fn wick_mul<C: Coefficient>(
    f: &ChaosField<C>,
    g: &ChaosField<C>,
    target: &Arc<IndexSet>,
) -> Result<ChaosField<C>> {
    wick_mul_impl(f, g, target, false).map(|(r, _)| r)
}

/// `F ⋄ G` plus the dropped mass `Σ_{α+β ∉ target} ‖a_α b_β‖`.
pub fn wick_mul_with_overflow<C: Coefficient>(
    f: &ChaosField<C>,
    g: &ChaosField<C>,
    target: &Arc<IndexSet>,
) -> Result<(ChaosField<C>, f64)> {
    wick_mul_impl(f, g, target, true)
}

fn wick_mul_impl<C: Coefficient>(
    f: &ChaosField<C>,
    g: &ChaosField<C>,
    target: &Arc<IndexSet>,
    overflow: bool,
) -> Result<(ChaosField<C>, f64)> {
    f.check_compatible(g)?;
    let fs: Vec<(&MultiIndex, &C)> = f.iter().map(|(_, a, c)| (a, c)).collect();
    let coeffs = map_indexed(target.len(), |p| {
        let gamma = &target.members()[p];
        let mut acc: Option<C> = None;
        for &(alpha, a) in &fs {
            if alpha.degree() > gamma.degree() {
                continue;
            }
            let Some(beta) = gamma.sub_checked(alpha) else { continue };
            if let Some(b) = g.coeff(&beta) {
                acc.get_or_insert_with(|| C::zero(&f.space)).add_product(a, b);
            }
        }
        acc
    });
    let mut dropped = 0.0;
    if overflow {
        for &(alpha, a) in &fs {
            for (_, beta, b) in g.iter() {
                if !target.contains(&alpha.add(beta)) {
                    dropped += libm::sqrt(C::product(a, b).norm_sq());
                }
            }
        }
    }
    Ok((ChaosField { index_set: target.clone(), basis: f.basis, space: f.space.clone(), coeffs }, dropped))
}

/// `F^{⋄p}`; `p = 0` is the unit field.
pub fn wick_pow<C: Coefficient>(
    f: &ChaosField<C>,
    p: u32,
    target: &Arc<IndexSet>,
    one: C,
) -> Result<ChaosField<C>> {
    let mut acc = ChaosField::deterministic(target.clone(), one, f.basis);
    for _ in 0..p {
        acc = wick_mul(&acc, f, target)?;
    }
    Ok(acc)
}

/// `exp^⋄ F = e^{a_0} · Σ_{n ≤ K} (F − a_0)^{⋄n} / n!`, exact on the
/// truncation because the zero-mean part raises degree by at least one per
/// factor.
pub fn wick_exp<C: Coefficient>(f: &ChaosField<C>, target: &Arc<IndexSet>, one: C) -> Result<ChaosField<C>> {
    let mut centered = f.project(target.clone());
    let mean = centered.coeff_at(0).cloned();
    centered.clear_at(0);
    let mut term = ChaosField::deterministic(target.clone(), one, f.basis);
    let mut sum = term.clone();
    for n in 1..=target.max_degree() {
        term = wick_mul(&term, &centered, target)?.scaled(1.0 / n as f64);
        sum = sum.add_scaled(&term, 1.0)?;
    }
    match mean {
        Some(m) => {
            let e = ChaosField::deterministic(target.clone(), m.exp(), f.basis);
            wick_mul(&e, &sum, target)
        }
        None => Ok(sum),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const G: BasisTag = BasisTag::GaussianHermite;

    fn set(k: u32, n: usize) -> Arc<IndexSet> {
        Arc::new(IndexSet::enumerate(k, n))
    }

    fn e(k: usize) -> MultiIndex {
        MultiIndex::unit(k)
    }

    #[test]
    fn product_of_units() {
        let s = set(2, 2);
        let f = ChaosField::single(s.clone(), &e(0), 1.0, G).unwrap();
        let g = ChaosField::single(s.clone(), &e(1), 1.0, G).unwrap();
        let h = wick_mul(&f, &g, &s).unwrap();
        assert_eq!(h.stored_count(), 1);
        assert_eq!(h.coeff(&MultiIndex::new(&[1, 1])), Some(&1.0));
    }

    #[test]
    fn unit_is_identity() {
        let s = set(3, 2);
        let mut f = ChaosField::zero(s.clone(), (), G);
        for (i, m) in s.members().iter().enumerate() {
            f.set(m, 0.3 * i as f64 - 1.0).unwrap();
        }
        let one = ChaosField::deterministic(s.clone(), 1.0, G);
        assert_eq!(wick_mul(&f, &one, &s).unwrap(), f);
    }

    #[test]
    fn first_order_product() {
        let s = set(2, 1);
        let (a0, a1, b0, b1) = (1.5, -0.5, 2.0, 3.0);
        let mut f = ChaosField::deterministic(s.clone(), a0, G);
        f.set(&e(0), a1).unwrap();
        let mut g = ChaosField::deterministic(s.clone(), b0, G);
        g.set(&e(0), b1).unwrap();
        let h = wick_mul(&f, &g, &s).unwrap();
        assert_eq!(h.coeff_or_zero(&MultiIndex::zero()), a0 * b0);
        assert_eq!(h.coeff_or_zero(&e(0)), a0 * b1 + a1 * b0);
        assert_eq!(h.coeff_or_zero(&MultiIndex::scaled_unit(0, 2)), a1 * b1);
    }

    #[test]
    fn overflow_mass_counts_dropped_pairs() {
        let s = set(1, 1);
        let f = ChaosField::single(s.clone(), &e(0), 2.0, G).unwrap();
        let (h, dropped) = wick_mul_with_overflow(&f, &f, &s).unwrap();
        assert_eq!(h.stored_count(), 0);
        assert_eq!(dropped, 4.0);
    }

    #[test]
    fn mismatched_operands() {
        let s = set(1, 1);
        let f = ChaosField::deterministic(s.clone(), 1.0, G);
        let g = f.poisson_correspondence();
        assert_eq!(wick_mul(&f, &g, &s).unwrap_err(), Error::BasisMismatch);
        let a = GridFunction::<f64>::zeros(crate::grid::GridSpec::line(4, 1.0).unwrap());
        let b = GridFunction::<f64>::zeros(crate::grid::GridSpec::line(8, 1.0).unwrap());
        let fa = ChaosField::deterministic(s.clone(), a, G);
        let fb = ChaosField::deterministic(s.clone(), b, G);
        assert_eq!(wick_mul(&fa, &fb, &s).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn powers() {
        let s = set(3, 2);
        let f = ChaosField::single(s.clone(), &e(0), 1.0, G).unwrap();
        assert_eq!(wick_pow(&f, 0, &s, 1.0).unwrap(), ChaosField::deterministic(s.clone(), 1.0, G));
        let sq = wick_pow(&f, 2, &s, 1.0).unwrap();
        assert_eq!(sq.stored_count(), 1);
        assert_eq!(sq.coeff(&MultiIndex::scaled_unit(0, 2)), Some(&1.0));
        let c = ChaosField::deterministic(s.clone(), 1.7, G);
        let c3 = wick_pow(&c, 3, &s, 1.0).unwrap();
        assert!((c3.coeff_or_zero(&MultiIndex::zero()) - 1.7f64.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn exponential() {
        let s = set(5, 1);
        let c = ChaosField::deterministic(s.clone(), 0.3, G);
        let ec = wick_exp(&c, &s, 1.0).unwrap();
        assert!((ec.coeff_or_zero(&MultiIndex::zero()) - libm::exp(0.3)).abs() < 1e-15);
        assert_eq!(ec.stored_count(), 1);
        let f = ChaosField::single(s.clone(), &e(0), 1.0, G).unwrap();
        let ef = wick_exp(&f, &s, 1.0).unwrap();
        let mut fact = 1.0;
        for n in 0..=5u32 {
            if n > 0 {
                fact *= n as f64;
            }
            let v = ef.coeff_or_zero(&MultiIndex::scaled_unit(0, n));
            assert!((v - 1.0 / fact).abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn exponential_generating_function() {
        let s = set(16, 1);
        let f = ChaosField::single(s.clone(), &e(0), 1.0, G).unwrap();
        let ef = wick_exp(&f, &s, 1.0).unwrap();
        let mut x = -2.0;
        while x <= 2.0 {
            let v = ef.sample_eval(&[x]).unwrap();
            assert!((v - libm::exp(x - 0.5)).abs() < 1e-6, "xi = {x}");
            x += 0.25;
        }
    }

    #[test]
    fn transform_values() {
        let s = set(2, 2);
        let alpha = MultiIndex::new(&[1, 1]);
        let f = ChaosField::single(s.clone(), &alpha, 1.0, G).unwrap();
        let z = [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)];
        assert_eq!(f.hermite_transform_eval(&z), Complex64::new(6.0, 0.0));
        let one = ChaosField::deterministic(s.clone(), 1.0, G);
        assert_eq!(one.hermite_transform_eval(&[Complex64::new(0.3, -7.0); 2]), Complex64::new(1.0, 0.0));
        let a = ChaosField::single(s.clone(), &e(0), 1.0, G).unwrap();
        let b = ChaosField::single(s.clone(), &e(1), 1.0, G).unwrap();
        let ab = wick_mul(&a, &b, &s).unwrap();
        assert_eq!(
            ab.hermite_transform_real(&[2.0, 3.0]),
            a.hermite_transform_real(&[2.0, 3.0]) * b.hermite_transform_real(&[2.0, 3.0])
        );
    }

    #[test]
    fn norms() {
        let s = set(3, 3);
        let alpha = MultiIndex::new(&[2, 0, 1]);
        let f = ChaosField::single(s.clone(), &alpha, -1.5, G).unwrap();
        let (rho, q) = (0.5, 2);
        let expected = 1.5 * libm::pow(2.0, (1.0 + rho) / 2.0) * libm::pow(2.0 * 2.0 * 6.0, q as f64 / 2.0);
        assert!((f.hk_norm(rho, q, NormKind::Test).unwrap() - expected).abs() < 1e-12 * expected);
        let expected_d = 1.5 * libm::pow(2.0, (1.0 - rho) / 2.0) * libm::pow(24.0, -(q as f64) / 2.0);
        assert!((f.hk_norm(rho, q, NormKind::Distribution).unwrap() - expected_d).abs() < 1e-12);
        let z: ChaosField<f64> = ChaosField::zero(s.clone(), (), G);
        assert_eq!(z.hk_norm(0.0, 0, NormKind::Test).unwrap(), 0.0);
        let c = ChaosField::deterministic(s.clone(), 3.0, G);
        for &(r, q) in &[(0.0, 0), (1.0, 5), (-1.0, 3)] {
            assert_eq!(c.hk_norm(r, q, NormKind::Test).unwrap(), 3.0);
            assert_eq!(c.hk_norm(r, q, NormKind::Distribution).unwrap(), 3.0);
        }
        assert!(c.hk_norm(1.5, 0, NormKind::Test).is_err());
    }

    #[test]
    fn moments() {
        let s = set(2, 1);
        let mut f = ChaosField::deterministic(s.clone(), 3.0, G);
        f.set(&e(0), 2.0).unwrap();
        assert_eq!(f.mean_variance(), (3.0, 4.0));
        let g = ChaosField::single(s.clone(), &MultiIndex::scaled_unit(0, 2), 1.0, G).unwrap();
        assert_eq!(g.mean_variance(), (0.0, 2.0));
        let d = ChaosField::deterministic(s.clone(), -4.0, G);
        assert_eq!(d.mean_variance().1, 0.0);
        assert_eq!(f.poisson_correspondence().mean_variance(), f.mean_variance());
    }

    #[test]
    fn sampling() {
        let s = set(2, 1);
        let f = ChaosField::single(s.clone(), &e(0), 1.0, G).unwrap();
        assert_eq!(f.sample_eval(&[0.5]).unwrap(), 0.5);
        let one = ChaosField::deterministic(s.clone(), 1.0, G);
        assert_eq!(one.sample_eval(&[-3.3]).unwrap(), 1.0);
        let h2 = ChaosField::single(s.clone(), &MultiIndex::scaled_unit(0, 2), 1.0, G).unwrap();
        assert_eq!(h2.sample_eval(&[1.0]).unwrap(), 0.0);
        assert_eq!(f.poisson_correspondence().sample_eval(&[0.5]), Err(Error::BasisMismatch));
        assert!(f.sample_eval(&[]).is_err());
    }

    #[test]
    fn correspondence_is_involutive() {
        let s = set(2, 2);
        let mut f = ChaosField::deterministic(s.clone(), 1.0, G);
        f.set(&e(1), 0.25).unwrap();
        let u = f.poisson_correspondence();
        assert_eq!(u.basis(), BasisTag::PoissonCharlier);
        assert_eq!(u.poisson_correspondence(), f);
        let unit = ChaosField::deterministic(s, 1.0, G).poisson_correspondence();
        assert_eq!(unit.coeff_at(0), Some(&1.0));
    }

    #[test]
    fn complex_conjugate_field() {
        let s = set(1, 1);
        let mut f = ChaosField::deterministic(s.clone(), Complex64::new(1.0, 2.0), G);
        f.set(&e(0), Complex64::new(0.0, -1.0)).unwrap();
        let c = f.conj();
        assert_eq!(c.coeff_at(0), Some(&Complex64::new(1.0, -2.0)));
        assert_eq!(c.coeff(&e(0)), Some(&Complex64::new(0.0, 1.0)));
        let (_, var) = f.mean_variance();
        assert_eq!(var, 1.0);
    }

    #[test]
    fn grid_covariance() {
        let grid = crate::grid::GridSpec::line(4, 4.0).unwrap();
        let s = set(1, 2);
        let a = GridFunction::from_data(grid, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = GridFunction::from_data(grid, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let mut f = ChaosField::zero(s.clone(), grid, G);
        f.set(&e(0), a).unwrap();
        f.set(&e(1), b).unwrap();
        assert_eq!(f.covariance(1, 3), 2.0 * 4.0 + 1.0);
        let (_, var) = f.mean_variance();
        assert_eq!(var.data(), &[1.0, 5.0, 9.0, 17.0]);
    }
}
