//! FFT-based periodic derivatives, Hilbert transform, semigroups and
//! de-aliasing on a [`GridSpec`].
//!
//! Bin `j` of axis `a` carries the mode `e^{i k x}` with `k = 2π m / L`,
//! `m = signed_mode(j, n)`. Odd-order multipliers vanish on the Nyquist bin
//! so that real data stays real.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{signed_mode, wavenumber, GridFft};
use crate::grid::{AxisRole, GridFunction, GridSpec, MAX_AXES};
use crate::scalar::{cis, Scalar};

#[derive(Debug, Clone)]
pub struct SpectralKernel {
    grid: GridSpec,
    fft: GridFft,
    k: Vec<Vec<f64>>,
    /// `|k|²` summed over spatial axes, per flat bin.
    k2: Vec<f64>,
    /// 2/3-rule mask over spatial axes.
    keep: Vec<bool>,
}

impl SpectralKernel {
    pub fn new(grid: GridSpec) -> Result<Self> {
        let fft = GridFft::new(grid)?;
        let k: Vec<Vec<f64>> = grid
            .axes()
            .iter()
            .map(|a| (0..a.nodes).map(|j| wavenumber(j, a.nodes, a.length)).collect())
            .collect();
        let mut k2 = Vec::with_capacity(grid.len());
        let mut keep = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            let idx = grid.unflatten(flat);
            let mut s = 0.0;
            let mut ok = true;
            for (ax, a) in grid.axes().iter().enumerate() {
                if a.role != AxisRole::Space {
                    continue;
                }
                s += k[ax][idx[ax]] * k[ax][idx[ax]];
                let m = signed_mode(idx[ax], a.nodes).unsigned_abs() as usize;
                ok &= 3 * m < a.nodes;
            }
            k2.push(s);
            keep.push(ok);
        }
        Ok(Self { grid, fft, k, k2, keep })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Angular wavenumbers of every bin on `axis`.
    pub fn wavenumbers(&self, axis: usize) -> &[f64] {
        &self.k[axis]
    }

    pub fn laplacian_symbol(&self) -> &[f64] {
        &self.k2
    }

    pub fn wavevector(&self, flat: usize) -> [f64; MAX_AXES] {
        let idx = self.grid.unflatten(flat);
        let mut out = [0.0; MAX_AXES];
        for ax in 0..self.grid.dim() {
            out[ax] = self.k[ax][idx[ax]];
        }
        out
    }

    fn is_nyquist(&self, flat: usize, axis: usize) -> bool {
        let n = self.grid.axis(axis).nodes;
        self.grid.unflatten(flat)[axis] == n / 2
    }

    fn check<S: Scalar>(&self, u: &GridFunction<S>) {
        assert_eq!(*u.grid(), self.grid, "grid function lives on a different grid");
    }

    pub fn spectrum<S: Scalar>(&self, u: &GridFunction<S>) -> Vec<Complex64> {
        self.check(u);
        let mut buf: Vec<Complex64> = u.data().iter().map(|v| v.to_complex()).collect();
        self.fft.forward_all(&mut buf);
        buf
    }

    pub fn synthesize<S: Scalar>(&self, mut spectrum: Vec<Complex64>) -> GridFunction<S> {
        self.fft.inverse_all(&mut spectrum);
        let data = spectrum.into_iter().map(S::from_complex).collect();
        GridFunction::from_data(self.grid, data).expect("spectrum length matches the grid")
    }

    /// Applies a per-bin multiplier given by `symbol(flat)`.
    pub fn apply<S: Scalar>(&self, u: &GridFunction<S>, symbol: impl Fn(usize) -> Complex64) -> GridFunction<S> {
        let mut s = self.spectrum(u);
        for (flat, v) in s.iter_mut().enumerate() {
            *v *= symbol(flat);
        }
        self.synthesize(s)
    }

    pub fn apply_diagonal<S: Scalar>(&self, u: &GridFunction<S>, diag: &[Complex64]) -> GridFunction<S> {
        self.apply(u, |f| diag[f])
    }

    /// `(i k_axis)^order`, computed by FFT; `order ∈ {1, 2, 3}`.
    pub fn derivative<S: Scalar>(&self, u: &GridFunction<S>, order: u32, axis: usize) -> Result<GridFunction<S>> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidParameter(alloc::format!("derivative order {order} not in 1..=3")));
        }
        if axis >= self.grid.dim() {
            return Err(Error::DimensionMismatch(alloc::format!("axis {axis} on a {}-axis grid", self.grid.dim())));
        }
        let symbols = self.derivative_symbol(order, axis);
        Ok(self.apply_diagonal(u, &symbols))
    }

    pub fn derivative_symbol(&self, order: u32, axis: usize) -> Vec<Complex64> {
        (0..self.grid.len())
            .map(|f| {
                if order % 2 == 1 && self.is_nyquist(f, axis) {
                    return Complex64::new(0.0, 0.0);
                }
                Complex64::new(0.0, self.k[axis][self.grid.unflatten(f)[axis]]).powu(order)
            })
            .collect()
    }

    pub fn laplacian<S: Scalar>(&self, u: &GridFunction<S>) -> GridFunction<S> {
        self.apply(u, |f| Complex64::new(-self.k2[f], 0.0))
    }

    /// Principal-value Hilbert transform `PV (1/π)∫ f(y)/(x−y) dy` on a
    /// periodic line: multiplier `−i·sign(k)` on `e^{ikx}`, so `H[cos] = sin`.
    pub fn hilbert_transform<S: Scalar>(&self, u: &GridFunction<S>) -> Result<GridFunction<S>> {
        if self.grid.dim() != 1 {
            return Err(Error::DimensionMismatch("Hilbert transform is defined on 1-D grids".into()));
        }
        Ok(self.apply_diagonal(u, &self.hilbert_symbol()))
    }

    pub fn hilbert_symbol(&self) -> Vec<Complex64> {
        (0..self.grid.len())
            .map(|f| {
                let k = self.k[0][f];
                if k == 0.0 || self.is_nyquist(f, 0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -k.signum())
                }
            })
            .collect()
    }

    /// `e^{tνΔ}`.
    pub fn heat_symbol(&self, t: f64, diffusivity: f64) -> Vec<Complex64> {
        self.k2.iter().map(|&k2| Complex64::new(libm::exp(-diffusivity * k2 * t), 0.0)).collect()
    }

    /// `e^{itΔ}`.
    pub fn schrodinger_symbol(&self, t: f64) -> Vec<Complex64> {
        self.k2.iter().map(|&k2| cis(-k2 * t)).collect()
    }

    /// Zeroes every bin outside the 2/3-rule band.
    pub fn dealias<S: Scalar>(&self, u: &GridFunction<S>) -> GridFunction<S> {
        self.apply(u, |f| if self.keep[f] { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.keep
    }

    /// Trigonometric interpolant of 1-D data at a (possibly complex) point.
    /// The Nyquist bin is split evenly between `±k`.
    pub fn eval_at<S: Scalar>(&self, u: &GridFunction<S>, x: Complex64) -> Complex64 {
        assert_eq!(self.grid.dim(), 1, "point evaluation is implemented on 1-D grids");
        let a = self.grid.axis(0);
        let n = a.nodes;
        let spec = self.spectrum(u);
        let y = x - a.origin;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in spec.iter().enumerate() {
            let k = self.k[0][j];
            if j == n / 2 {
                let e = (Complex64::new(0.0, k) * y).exp() + (Complex64::new(0.0, -k) * y).exp();
                acc += c * e * 0.5;
            } else {
                acc += c * (Complex64::new(0.0, k) * y).exp();
            }
        }
        acc / n as f64
    }

    /// Largest spatial `|k|` resolved by the grid.
    pub fn max_wavenumber(&self) -> f64 {
        self.k.iter().flatten().fold(0.0, |m, &k| m.max(k.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn line(n: usize) -> (GridSpec, SpectralKernel) {
        let g = GridSpec::line(n, 2.0 * PI).unwrap();
        (g, SpectralKernel::new(g).unwrap())
    }

    #[test]
    fn derivative_of_sine() {
        let (g, k) = line(64);
        let u = GridFunction::from_fn(g, |x| libm::sin(x[0]));
        let du = k.derivative(&u, 1, 0).unwrap();
        let expect = GridFunction::from_fn(g, |x| libm::cos(x[0]));
        assert!(du.max_abs_diff(&expect) < 1e-12);
        let c = GridFunction::constant(g, 3.0);
        assert!(k.derivative(&c, 2, 0).unwrap().sup_norm() < 1e-14);
    }

    #[test]
    fn third_derivative_of_mode() {
        let (g, k) = line(32);
        let u = GridFunction::from_fn(g, |x| cis(3.0 * x[0]));
        let d3 = k.derivative(&u, 3, 0).unwrap();
        let expect = u.map(|v| v * Complex64::new(0.0, 3.0).powu(3));
        assert!(d3.max_abs_diff(&expect) < 1e-11);
        assert!(k.derivative(&u, 4, 0).is_err());
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let (g, k) = line(64);
        let u = GridFunction::from_fn(g, |x| libm::cos(2.0 * x[0]) + 1.5);
        let h = k.hilbert_transform(&u).unwrap();
        let expect = GridFunction::from_fn(g, |x| libm::sin(2.0 * x[0]));
        assert!(h.max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn hilbert_squares_to_minus_identity() {
        let (g, k) = line(128);
        let u = GridFunction::from_fn(g, |x| libm::exp(libm::cos(x[0])) + libm::sin(3.0 * x[0]));
        let hh = k.hilbert_transform(&k.hilbert_transform(&u).unwrap()).unwrap();
        let m = u.mean();
        let expect = u.map(|v| -(v - m));
        assert!(hh.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn hilbert_matches_principal_value_quadrature() {
        // Periodic kernel: PV (1/2π) ∫ f(y) cot((x−y)/2) dy.
        let (g, k) = line(64);
        let f = |x: f64| libm::exp(libm::sin(x));
        let u = GridFunction::from_fn(g, |x| f(x[0]));
        let h = k.hilbert_transform(&u).unwrap();
        let x0 = g.axis(0).coordinate(5);
        let m = 20_000;
        let dy = 2.0 * PI / m as f64;
        let mut s = 0.0;
        for j in 0..m {
            // Midpoints symmetric about x0 cancel the singularity.
            let y = x0 + (j as f64 + 0.5) * dy;
            s += (f(y) - f(2.0 * x0 - y)) / libm::tan((x0 - y) / 2.0);
        }
        let pv = s * dy / (2.0 * PI) * 0.5;
        assert!((h.data()[5] - pv).abs() < 1e-6, "{} vs {pv}", h.data()[5]);
    }

    #[test]
    fn semigroups() {
        let (g, k) = line(64);
        let u = GridFunction::from_fn(g, |x| libm::cos(2.0 * x[0]));
        let hu = k.apply_diagonal(&u, &k.heat_symbol(0.3, 0.5));
        assert!(hu.max_abs_diff(&u.scaled(libm::exp(-0.5 * 4.0 * 0.3))) < 1e-14);
        let psi = u.to_complex();
        let s = k.apply_diagonal(&psi, &k.schrodinger_symbol(0.7));
        assert!((s.l2_norm() - psi.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn dealiasing_drops_high_modes() {
        let (g, k) = line(32);
        let u = GridFunction::from_fn(g, |x| libm::cos(2.0 * x[0]) + libm::cos(12.0 * x[0]));
        let d = k.dealias(&u);
        let expect = GridFunction::from_fn(g, |x| libm::cos(2.0 * x[0]));
        assert!(d.max_abs_diff(&expect) < 1e-13);
    }

    #[test]
    fn point_evaluation() {
        let (g, k) = line(32);
        let u = GridFunction::from_fn(g, |x| libm::sin(x[0]) + 0.5 * libm::cos(3.0 * x[0]));
        for &x in &[0.3, -2.0, 3.1] {
            let v = k.eval_at(&u, Complex64::new(x, 0.0));
            assert!((v.re - (libm::sin(x) + 0.5 * libm::cos(3.0 * x))).abs() < 1e-13);
        }
        let z = Complex64::new(0.4, 0.2);
        let v = k.eval_at(&u, z);
        assert!((v - (z.sin() + (z * 3.0).cos() * 0.5)).norm() < 1e-13);
    }

    #[test]
    fn planar_laplacian() {
        let g = GridSpec::plane(32, 2.0 * PI, 16, 2.0 * PI).unwrap();
        let k = SpectralKernel::new(g).unwrap();
        let u = GridFunction::from_fn(g, |x| libm::sin(x[0]) * libm::cos(2.0 * x[1]));
        let lu = k.laplacian(&u);
        assert!(lu.max_abs_diff(&u.scaled(-5.0)) < 1e-12);
    }
}
