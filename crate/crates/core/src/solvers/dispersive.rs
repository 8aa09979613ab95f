//! Wick-quantized KdV `φ_t + φ ⋄ φ_x + φ_xxx = 0` and Benjamin–Ono
//! `φ_t + φ ⋄ φ_x + H φ_xx = 0` on periodic 1-D grids.
//!
//! The nonlinearity is taken in conservative form `½∂_x(φ ⋄ φ)` with 2/3
//! de-aliasing; the dispersive part is integrated exactly (IF-RK4).

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{dense_overflow, dense_wick, drive, if_rk4_step, Equation, History, PropagatorSystem, RealField, RunOptions};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::multiindex::IndexSet;
use crate::spectral::SpectralKernel;
use crate::solvers::transport::RK4_CFL_LIMIT;

pub fn solve_kdv_wick(phi0: &RealField, opts: &RunOptions) -> Result<History<f64>> {
    solve(phi0, opts, Equation::Kdv, |k| k * k * k)
}

pub fn solve_benjamin_ono_wick(phi0: &RealField, opts: &RunOptions) -> Result<History<f64>> {
    solve(phi0, opts, Equation::BenjaminOno, |k| -k * k.abs())
}

/// `L = i ω(k)` for the dispersion relation `ω`; odd symbols vanish at Nyquist.
fn solve(phi0: &RealField, opts: &RunOptions, equation: Equation, omega: fn(f64) -> f64) -> Result<History<f64>> {
    opts.validate()?;
    let grid = *phi0.space();
    if grid.dim() != 1 {
        return Err(Error::DimensionMismatch(alloc::format!("{} needs a 1-D grid", equation.tag())));
    }
    let kernel = SpectralKernel::new(grid)?;
    let set = phi0.index_set().clone();
    let (_, dt) = opts.steps();
    let n = grid.axis(0).nodes;
    let e_half: Vec<Complex64> = kernel
        .wavenumbers(0)
        .iter()
        .enumerate()
        .map(|(j, &k)| if 2 * j == n { Complex64::new(1.0, 0.0) } else { crate::scalar::cis(omega(k) * 0.5 * dt) })
        .collect();
    let speed: f64 = phi0.iter().map(|(_, _, c)| c.sup_norm()).sum();
    let courant = dt * speed * kernel.max_wavenumber();
    if courant > RK4_CFL_LIMIT {
        return Err(Error::Cfl { courant, limit: RK4_CFL_LIMIT });
    }
    let sys = PropagatorSystem::from_field(equation, phi0, dt);
    drive(sys, opts, |sys| {
        sys.state = if_rk4_step(&kernel, &e_half, &sys.state, sys.time, sys.dt, |_, u| nonlinear(&kernel, u, &set))?;
        let ud: Vec<GridFunction<f64>> = sys.state.iter().map(|c| kernel.dealias(c)).collect();
        sys.overflow += sys.dt * 0.5 * dense_overflow(&ud, &ud, &set);
        Ok(())
    })
}

fn nonlinear(kernel: &SpectralKernel, u: &[GridFunction<f64>], set: &IndexSet) -> Result<Vec<GridFunction<f64>>> {
    let ud: Vec<GridFunction<f64>> = u.iter().map(|c| kernel.dealias(c)).collect();
    dense_wick(&ud, &ud, set)
        .iter()
        .map(|sq| kernel.derivative(&kernel.dealias(sq), 1, 0).map(|d| d.scaled(-0.5)))
        .collect()
}
