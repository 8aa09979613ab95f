//! Wick-quantized linear and quasilinear transport.
//!
//! Linear model: `∂_t u + Σ_i V_i ⋄ ∂_i u = c u + d` with chaos velocities
//! `V_i = Σ_j a_ij Γ_j + b_i`. The coefficient system
//! `∂_t u_γ = −Σ_i Σ_{α+β=γ} V_{i,α} ∂_i u_β + c u_γ + d δ_{γ0}`
//! is advanced with spectral derivatives and RK4.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{
    axpy, check_noise, dense_overflow, dense_wick, drive, noise_convolution, noise_slices, rk4_step, Equation,
    History, PropagatorSystem, RealField, RunOptions,
};
use crate::chaos::ChaosField;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::multiindex::{IndexSet, MultiIndex};
use crate::noise::is_space_independent;
use crate::quadrature::gauss_legendre;
use crate::spectral::SpectralKernel;

/// RK4 stability bound on the imaginary axis (`2√2`, rounded down).
pub const RK4_CFL_LIMIT: f64 = 2.8;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearTransport {
    /// One chaos velocity per spatial axis, over the noise grid.
    pub velocity: Vec<RealField>,
    /// `c(x, t)` on the noise grid.
    pub reaction: Option<GridFunction<f64>>,
    /// `d(x, t)` on the noise grid.
    pub source: Option<GridFunction<f64>>,
}

impl LinearTransport {
    /// `∂_t u + Γ ⋄ ∂_x u = 0`.
    pub fn simple(noise: RealField) -> Self {
        Self { velocity: alloc::vec![noise], reaction: None, source: None }
    }

    /// Assembles `V_i = Σ_j a_ij Γ_j + b_i` from deterministic `a_ij`, `b_i`
    /// sampled on the noise grid. All `Γ_j` must share one index set.
    pub fn from_coefficients(
        a: &[Vec<GridFunction<f64>>],
        noises: &[RealField],
        b: &[GridFunction<f64>],
        reaction: Option<GridFunction<f64>>,
        source: Option<GridFunction<f64>>,
    ) -> Result<Self> {
        let first = noises.first().ok_or_else(|| Error::InvalidParameter("no noise fields supplied".into()))?;
        let n = a.len();
        if b.len() != n || a.iter().any(|row| row.len() != noises.len()) {
            return Err(Error::DimensionMismatch("a must be n×m and b of length n for m noise fields".into()));
        }
        let set = first.index_set().clone();
        let grid = *first.space();
        let mut velocity = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = ChaosField::deterministic(set.clone(), b[i].clone(), first.basis());
            for (j, g) in noises.iter().enumerate() {
                if **g.index_set() != *set || *g.space() != grid {
                    return Err(Error::IndexSetMismatch("noise fields must share index set and grid".into()));
                }
                let term = g.map(grid, |c| {
                    let data = c.data().iter().zip(a[i][j].data()).map(|(x, y)| x * y).collect();
                    GridFunction::from_data(grid, data).expect("same grid")
                });
                v = v.add_scaled(&term, 1.0)?;
            }
            velocity.push(v);
        }
        Ok(Self { velocity, reaction, source })
    }

    fn courant(&self, dt: f64, kernel: &SpectralKernel) -> f64 {
        let mut c = 0.0;
        for (i, v) in self.velocity.iter().enumerate() {
            let kmax = kernel.wavenumbers(i).iter().fold(0.0f64, |m, k| m.max(k.abs()));
            let speed: f64 = v.iter().map(|(_, _, g)| g.sup_norm()).sum();
            c += dt * speed * kmax;
        }
        if let Some(r) = &self.reaction {
            c += dt * r.sup_norm();
        }
        c
    }

    pub fn solve(&self, phi0: &RealField, opts: &RunOptions) -> Result<History<f64>> {
        opts.validate()?;
        let grid = *phi0.space();
        if self.velocity.len() != grid.dim() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} velocity fields for a {}-D grid",
                self.velocity.len(),
                grid.dim()
            )));
        }
        for v in &self.velocity {
            check_noise(v, phi0.index_set(), &grid, phi0.basis())?;
        }
        let kernel = SpectralKernel::new(grid)?;
        let (_, dt) = opts.steps();
        let courant = self.courant(dt, &kernel);
        if courant > RK4_CFL_LIMIT {
            return Err(Error::Cfl { courant, limit: RK4_CFL_LIMIT });
        }
        let set = phi0.index_set().clone();
        let sys = PropagatorSystem::from_field(Equation::Transport, phi0, dt);
        drive(sys, opts, |sys| {
            let rhs = |t: f64, u: &[GridFunction<f64>]| self.rhs(&kernel, &set, t, u, false).map(|r| r.0);
            sys.state = rk4_step(&sys.state, sys.time, sys.dt, rhs)?;
            let (_, dropped) = self.rhs(&kernel, &set, sys.time + sys.dt, &sys.state, true)?;
            sys.overflow += sys.dt * dropped;
            Ok(())
        })
    }

    fn rhs(
        &self,
        kernel: &SpectralKernel,
        set: &IndexSet,
        t: f64,
        u: &[GridFunction<f64>],
        want_overflow: bool,
    ) -> Result<(Vec<GridFunction<f64>>, f64)> {
        let grid = *kernel.grid();
        let mut out: Vec<GridFunction<f64>> = (0..u.len()).map(|_| GridFunction::zeros(grid)).collect();
        let mut dropped = 0.0;
        for (i, v) in self.velocity.iter().enumerate() {
            let du: Vec<GridFunction<f64>> = u.iter().map(|c| kernel.derivative(c, 1, i)).collect::<Result<_>>()?;
            let (conv, d) = noise_convolution(&noise_slices(v, t), &du, set, want_overflow);
            out = axpy(&out, -1.0, &conv);
            dropped += d;
        }
        if let Some(c) = &self.reaction {
            let cs = c.time_slice(t);
            for (o, uv) in out.iter_mut().zip(u) {
                for ((a, &b), &w) in o.data_mut().iter_mut().zip(uv.data()).zip(cs.data()) {
                    *a += w * b;
                }
            }
        }
        if let Some(d) = &self.source {
            let ds = d.time_slice(t);
            for (a, &b) in out[0].data_mut().iter_mut().zip(ds.data()) {
                *a += b;
            }
        }
        Ok((out, dropped))
    }
}

/// `∂_t u + Γ ⋄ ∂_x u = 0` on a 1-D periodic grid.
pub fn solve_transport_wick(noise: &RealField, phi0: &RealField, opts: &RunOptions) -> Result<History<f64>> {
    if phi0.space().dim() != 1 {
        return Err(Error::DimensionMismatch("the scalar transport model is 1-D; use LinearTransport".into()));
    }
    LinearTransport::simple(noise.clone()).solve(phi0, opts)
}

/// Quasilinear model `∂_t u + Σ_i {Σ_j a_ij(u)^⋄ ⋄ Γ_j + b_i(u)^⋄} ⋄ ∂_i u = c(u)^⋄`
/// with polynomial coefficient functions (ascending coefficient lists).
#[derive(Debug, Clone, PartialEq)]
pub struct QuasilinearTransport {
    pub noises: Vec<RealField>,
    pub a: Vec<Vec<Vec<f64>>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<f64>,
}

impl QuasilinearTransport {
    pub fn solve(&self, phi0: &RealField, opts: &RunOptions) -> Result<History<f64>> {
        opts.validate()?;
        let grid = *phi0.space();
        let n = grid.dim();
        if self.a.len() != n || self.b.len() != n || self.a.iter().any(|r| r.len() != self.noises.len()) {
            return Err(Error::DimensionMismatch("a must be n×m and b of length n".into()));
        }
        for g in &self.noises {
            check_noise(g, phi0.index_set(), &grid, phi0.basis())?;
        }
        let kernel = SpectralKernel::new(grid)?;
        let set = phi0.index_set().clone();
        let (_, dt) = opts.steps();
        let sys = PropagatorSystem::from_field(Equation::Transport, phi0, dt);
        let courant = self.courant(&kernel, &set, &sys.state, dt)?;
        if courant > RK4_CFL_LIMIT {
            return Err(Error::Cfl { courant, limit: RK4_CFL_LIMIT });
        }
        drive(sys, opts, |sys| {
            let rhs = |t: f64, u: &[GridFunction<f64>]| self.rhs(&kernel, &set, t, u).map(|r| r.0);
            sys.state = rk4_step(&sys.state, sys.time, sys.dt, rhs)?;
            let (_, dropped) = self.rhs(&kernel, &set, sys.time + sys.dt, &sys.state)?;
            sys.overflow += sys.dt * dropped;
            Ok(())
        })
    }

    fn velocities(&self, set: &IndexSet, t: f64, u: &[GridFunction<f64>]) -> Vec<Vec<GridFunction<f64>>> {
        (0..self.a.len())
            .map(|i| {
                let mut v = wick_poly(&self.b[i], u, set);
                for (j, g) in self.noises.iter().enumerate() {
                    let p = wick_poly(&self.a[i][j], u, set);
                    let (gp, _) = noise_convolution(&noise_slices(g, t), &p, set, false);
                    v = axpy(&v, 1.0, &gp);
                }
                v
            })
            .collect()
    }

    fn courant(&self, kernel: &SpectralKernel, set: &IndexSet, u: &[GridFunction<f64>], dt: f64) -> Result<f64> {
        let mut c = 0.0;
        for (i, v) in self.velocities(set, 0.0, u).iter().enumerate() {
            let kmax = kernel.wavenumbers(i).iter().fold(0.0f64, |m, k| m.max(k.abs()));
            c += dt * kmax * v.iter().map(GridFunction::sup_norm).sum::<f64>();
        }
        Ok(c)
    }

    fn rhs(
        &self,
        kernel: &SpectralKernel,
        set: &IndexSet,
        t: f64,
        u: &[GridFunction<f64>],
    ) -> Result<(Vec<GridFunction<f64>>, f64)> {
        let mut out = wick_poly(&self.c, u, set);
        let mut dropped = 0.0;
        for (i, v) in self.velocities(set, t, u).iter().enumerate() {
            let du: Vec<GridFunction<f64>> = u.iter().map(|c| kernel.derivative(c, 1, i)).collect::<Result<_>>()?;
            out = axpy(&out, -1.0, &dense_wick(v, &du, set));
            dropped += dense_overflow(v, &du, set);
        }
        Ok((out.iter().map(|c| kernel.dealias(c)).collect(), dropped))
    }
}

/// `Σ_m p_m u^{⋄m}` by Horner's rule on dense coefficient vectors.
fn wick_poly(p: &[f64], u: &[GridFunction<f64>], set: &IndexSet) -> Vec<GridFunction<f64>> {
    let grid = *u[0].grid();
    let unit = |c: f64| -> Vec<GridFunction<f64>> {
        (0..set.len()).map(|q| if q == 0 { GridFunction::constant(grid, c) } else { GridFunction::zeros(grid) }).collect()
    };
    let Some((&top, rest)) = p.split_last() else {
        return unit(0.0);
    };
    let mut acc = unit(top);
    for &c in rest.iter().rev() {
        acc = axpy(&dense_wick(&acc, u, set), 1.0, &unit(c));
    }
    acc
}

/// Closed-form transformed solution `φ̃₀(x − ∫₀ᵗ ℋΓ(r, z) dr)` for
/// space-independent noise, with `φ̃₀` evaluated by trigonometric
/// interpolation and the time integral by composite Gauss–Legendre.
pub fn eval_transport_characteristic(
    x: f64,
    t: f64,
    z: &[Complex64],
    noise: &RealField,
    phi0: &RealField,
) -> Result<Complex64> {
    if !is_space_independent(noise) {
        return Err(Error::SpaceDependentNoise);
    }
    let grid = *phi0.space();
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch("characteristic closed form is 1-D".into()));
    }
    let kernel = SpectralKernel::new(grid)?;
    let mut shift = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let ngrid = noise.space();
    let pieces = match ngrid.time_axis() {
        Some(ta) => libm::ceil(t / ngrid.axis(ta).spacing()).max(1.0) as usize,
        None => 1,
    };
    let (nodes, weights) = gauss_legendre(4, 0.0, 1.0);
    for (_, alpha, c) in noise.iter() {
        let w = alpha.monomial(z, one);
        let mut integral = 0.0;
        if t > 0.0 {
            let h = t / pieces as f64;
            for piece in 0..pieces {
                for (s, wt) in nodes.iter().zip(&weights) {
                    let r = (piece as f64 + s) * h;
                    integral += wt * h * c.time_slice(r).data()[0];
                }
            }
        }
        shift += w * integral;
    }
    let tilde = phi0.hermite_transform_eval(z);
    Ok(kernel.eval_at(&tilde, Complex64::new(x, 0.0) - shift))
}

/// `g(t)·1` on a space-time grid: deterministic space-independent velocity.
pub fn deterministic_velocity(
    set: alloc::sync::Arc<IndexSet>,
    grid: crate::grid::GridSpec,
    g: impl Fn(f64) -> f64,
) -> Result<RealField> {
    let ta = grid.time_axis();
    let f = GridFunction::from_fn(grid, |c| match ta {
        Some(a) => g(c[a]),
        None => g(0.0),
    });
    ChaosField::single(set, &MultiIndex::zero(), f, crate::chaos::BasisTag::GaussianHermite)
}
