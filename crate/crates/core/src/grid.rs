//! Uniform periodic grids and nodal grid functions.
//!
//! Storage is axis-0 fastest: for a space-time grid `[x, t]` every time
//! node owns a contiguous spatial slice.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_AXES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisRole {
    Space,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub nodes: usize,
    pub length: f64,
    pub origin: f64,
    pub role: AxisRole,
}

impl Axis {
    pub fn space(nodes: usize, length: f64) -> Self {
        Self { nodes, length, origin: -0.5 * length, role: AxisRole::Space }
    }

    pub fn time(nodes: usize, length: f64) -> Self {
        Self { nodes, length, origin: 0.0, role: AxisRole::Time }
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.nodes as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing()
    }

    pub fn center(&self) -> f64 {
        self.origin + 0.5 * self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    axes: [Axis; MAX_AXES],
    dim: usize,
}

impl GridSpec {
    pub fn new(axes: &[Axis]) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_AXES {
            return Err(Error::DimensionMismatch(alloc::format!(
                "a grid has 1..={MAX_AXES} axes, got {}",
                axes.len()
            )));
        }
        for a in axes {
            if a.nodes < 2 || !a.nodes.is_power_of_two() {
                return Err(Error::NotPowerOfTwo(a.nodes));
            }
            if !(a.length > 0.0) || !a.length.is_finite() {
                return Err(Error::InvalidParameter(alloc::format!(
                    "axis length must be positive, got {}",
                    a.length
                )));
            }
        }
        let mut store = [axes[0]; MAX_AXES];
        store[..axes.len()].copy_from_slice(axes);
        Ok(Self { axes: store, dim: axes.len() })
    }

    /// Periodic 1-D spatial grid centred on the origin.
    pub fn line(nodes: usize, length: f64) -> Result<Self> {
        Self::new(&[Axis::space(nodes, length)])
    }

    pub fn plane(nx: usize, lx: f64, ny: usize, ly: f64) -> Result<Self> {
        Self::new(&[Axis::space(nx, lx), Axis::space(ny, ly)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes[..self.dim]
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes()[i]
    }

    pub fn len(&self) -> usize {
        self.axes().iter().map(|a| a.nodes).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance between consecutive storage entries along axis `i`.
    pub fn stride(&self, i: usize) -> usize {
        self.axes()[..i].iter().map(|a| a.nodes).product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes().iter().map(|a| a.spacing()).product()
    }

    pub fn space_dim(&self) -> usize {
        self.axes().iter().filter(|a| a.role == AxisRole::Space).count()
    }

    /// Position of the time axis, if any.
    pub fn time_axis(&self) -> Option<usize> {
        self.axes().iter().position(|a| a.role == AxisRole::Time)
    }

    /// The grid restricted to its spatial axes.
    pub fn spatial(&self) -> GridSpec {
        let axes: Vec<Axis> =
            self.axes().iter().copied().filter(|a| a.role == AxisRole::Space).collect();
        GridSpec::new(&axes).expect("a grid keeps at least one spatial axis")
    }

    /// Appends a time axis (must be last, see the crate storage convention).
    pub fn with_time(&self, nodes: usize, length: f64) -> Result<GridSpec> {
        let mut axes: Vec<Axis> = self.axes().to_vec();
        axes.push(Axis::time(nodes, length));
        GridSpec::new(&axes)
    }

    /// Multi-dimensional node index of a flat storage offset.
    pub fn unflatten(&self, mut flat: usize) -> [usize; MAX_AXES] {
        let mut idx = [0; MAX_AXES];
        for (i, a) in self.axes().iter().enumerate() {
            idx[i] = flat % a.nodes;
            flat /= a.nodes;
        }
        idx
    }

    pub fn coordinates(&self, flat: usize) -> [f64; MAX_AXES] {
        let idx = self.unflatten(flat);
        let mut c = [0.0; MAX_AXES];
        for (i, a) in self.axes().iter().enumerate() {
            c[i] = a.coordinate(idx[i]);
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<S> {
    grid: GridSpec,
    data: Vec<S>,
}

impl<S: Scalar> GridFunction<S> {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { data: alloc::vec![S::zero(); grid.len()], grid }
    }

    pub fn from_data(grid: GridSpec, data: Vec<S>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "grid has {} nodes but {} values were supplied",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data })
    }

    /// Samples `f` at every node; coordinates are passed in axis order.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> S) -> Self {
        let d = grid.dim();
        let data = (0..grid.len()).map(|i| f(&grid.coordinates(i)[..d])).collect();
        Self { grid, data }
    }

    pub fn constant(grid: GridSpec, value: S) -> Self {
        Self { data: alloc::vec![value; grid.len()], grid }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> GridFunction<T> {
        GridFunction { grid: self.grid, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v.scale(s))
    }

    pub fn to_complex(&self) -> GridFunction<num_complex::Complex64> {
        self.map(|v| v.to_complex())
    }

    /// `Σ |u|² dV`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `Σ u dV`.
    pub fn integral(&self) -> S {
        let mut acc = S::zero();
        for &v in &self.data {
            acc += v;
        }
        acc.scale(self.grid.cell_volume())
    }

    pub fn mean(&self) -> S {
        self.integral().scale(1.0 / (self.grid.cell_volume() * self.data.len() as f64))
    }

    /// `‖a − b‖_{L²}`; panics on mismatched grids.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "distance between functions on different grids");
        let s: f64 = self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).norm_sqr()).sum();
        libm::sqrt(s * self.grid.cell_volume())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (&a, &b)| m.max((a - b).abs()))
    }
}

impl Axis {
    /// Fractional node position of `x`, wrapped into `[0, nodes)`.
    pub fn wrapped_position(&self, x: f64) -> f64 {
        let n = self.nodes as f64;
        let p = (x - self.origin) / self.spacing();
        let r = p - n * libm::floor(p / n);
        if r >= n {
            0.0
        } else {
            r
        }
    }
}

/// Periodic linear interpolation of `values` sampled on `axis`.
pub fn periodic_linear(values: &[f64], axis: &Axis, x: f64) -> f64 {
    let (i, w) = split(axis.wrapped_position(x));
    let n = axis.nodes;
    (1.0 - w) * values[i % n] + w * values[(i + 1) % n]
}

/// Periodic four-point (cubic Lagrange) interpolation of `values` on `axis`.
pub fn periodic_cubic(values: &[f64], axis: &Axis, x: f64) -> f64 {
    let (i, w) = split(axis.wrapped_position(x));
    let n = axis.nodes;
    let at = |o: isize| values[(i as isize + o).rem_euclid(n as isize) as usize];
    let (m1, p0, p1, p2) = (at(-1), at(0), at(1), at(2));
    -w * (w - 1.0) * (w - 2.0) / 6.0 * m1 + (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0 * p0
        - (w + 1.0) * w * (w - 2.0) / 2.0 * p1
        + (w + 1.0) * w * (w - 1.0) / 6.0 * p2
}

fn split(p: f64) -> (usize, f64) {
    let i = libm::floor(p);
    (i as usize, p - i)
}

impl<S: Scalar> GridFunction<S> {
    /// Spatial slice at time `t` of a function on a grid whose last axis is
    /// time, linearly interpolated and periodic in `t`. Returns a clone when
    /// the grid has no time axis.
    pub fn time_slice(&self, t: f64) -> GridFunction<S> {
        let Some(ta) = self.grid.time_axis() else {
            return self.clone();
        };
        let axis = self.grid.axis(ta);
        let (i, w) = split(axis.wrapped_position(t));
        let nt = axis.nodes;
        let spatial = self.grid.spatial();
        let m = spatial.len();
        let (a, b) = (&self.data[(i % nt) * m..][..m], &self.data[((i + 1) % nt) * m..][..m]);
        let data = a.iter().zip(b).map(|(&x, &y)| x.scale(1.0 - w) + y.scale(w)).collect();
        GridFunction { grid: spatial, data }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn layout_and_coordinates() {
        let g = GridSpec::plane(4, 4.0, 2, 1.0).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.stride(1), 4);
        assert_eq!(g.unflatten(5)[..2], [1, 1]);
        assert_eq!(g.coordinates(5)[..2], [-1.0, 0.0]);
        assert!(GridSpec::line(6, 1.0).is_err());
        assert!(GridSpec::line(8, -1.0).is_err());
    }

    #[test]
    fn norms_and_integrals() {
        let g = GridSpec::line(64, 2.0 * PI).unwrap();
        let u = GridFunction::from_fn(g, |x| libm::sin(x[0]));
        assert!((u.norm_sq() - PI).abs() < 1e-12);
        assert!(u.integral().abs() < 1e-13);
        let c = GridFunction::constant(g, 2.0);
        assert!((c.mean() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn interpolation() {
        let a = Axis::space(64, 2.0 * PI);
        let v: Vec<f64> = (0..64).map(|i| libm::sin(a.coordinate(i))).collect();
        for &x in &[0.1, -3.0, 2.9, 7.5, -10.0] {
            assert!((periodic_cubic(&v, &a, x) - libm::sin(x)).abs() < 1e-4);
            assert!((periodic_linear(&v, &a, x) - libm::sin(x)).abs() < 3e-3);
        }
        assert!((periodic_linear(&v, &a, a.coordinate(3)) - v[3]).abs() < 1e-15);
    }

    #[test]
    fn time_slices() {
        let g = GridSpec::line(4, 1.0).unwrap().with_time(4, 2.0).unwrap();
        let u = GridFunction::from_fn(g, |c| c[0] + 10.0 * c[1]);
        let s = u.time_slice(0.25);
        assert_eq!(s.grid().dim(), 1);
        for (i, v) in s.data().iter().enumerate() {
            assert!((v - (g.axis(0).coordinate(i) + 2.5)).abs() < 1e-12);
        }
        let wrap = u.time_slice(1.75);
        assert!((wrap.data()[0] - (g.axis(0).coordinate(0) + 7.5)).abs() < 1e-12);
    }
}
