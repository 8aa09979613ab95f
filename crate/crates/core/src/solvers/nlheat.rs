//! Wick-quantized nonlinear heat equation `∂_t φ + φ^{⋄p} = Δφ`, `p ∈ {2, 3}`.
//!
//! Integrating-factor RK4 with the exact heat flow; Wick powers are
//! evaluated on 2/3-de-aliased coefficients and filtered again.

use alloc::vec::Vec;

use super::{dense_overflow, dense_wick, drive, if_rk4_step, Equation, History, PropagatorSystem, RealField, RunOptions};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::multiindex::IndexSet;
use crate::spectral::SpectralKernel;

pub fn solve_nonlinear_heat_wick(phi0: &RealField, p: u32, opts: &RunOptions) -> Result<History<f64>> {
    if !(2..=3).contains(&p) {
        return Err(Error::InvalidParameter(alloc::format!("nonlinearity power {p} not in {{2, 3}}")));
    }
    opts.validate()?;
    let grid = *phi0.space();
    let kernel = SpectralKernel::new(grid)?;
    let set = phi0.index_set().clone();
    let (_, dt) = opts.steps();
    let e_half = kernel.heat_symbol(0.5 * dt, 1.0);
    let sys = PropagatorSystem::from_field(Equation::NonlinearHeat, phi0, dt);
    drive(sys, opts, |sys| {
        sys.state = if_rk4_step(&kernel, &e_half, &sys.state, sys.time, sys.dt, |_, u| {
            let (pow, _) = power(&kernel, u, p, &set, false);
            Ok(pow.iter().map(|c| c.scaled(-1.0)).collect())
        })?;
        let (_, dropped) = power(&kernel, &sys.state, p, &set, true);
        sys.overflow += sys.dt * dropped;
        Ok(())
    })
}

fn power(
    kernel: &SpectralKernel,
    u: &[GridFunction<f64>],
    p: u32,
    set: &IndexSet,
    want_overflow: bool,
) -> (Vec<GridFunction<f64>>, f64) {
    let ud: Vec<GridFunction<f64>> = u.iter().map(|c| kernel.dealias(c)).collect();
    let mut acc = ud.clone();
    let mut dropped = 0.0;
    for _ in 1..p {
        if want_overflow {
            dropped += dense_overflow(&acc, &ud, set);
        }
        acc = dense_wick(&acc, &ud, set);
    }
    (acc.iter().map(|c| kernel.dealias(c)).collect(), dropped)
}
