//! KPZ views of a heat solution and a direct pathwise KPZ integrator.
//!
//! With `ν = σ²/2` and `λ = σ²`, `h_t = νΔh + (λ/2)|∇h|² + Γ` is mapped to
//! `φ_t = ½σ²Δφ + φΓ` by `φ = exp((λ/2ν) h) = exp(h)` and to Burgers by
//! `v = −∇h`. These maps are pathwise, not Wick.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{if_rk4_step, RunOptions};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::spectral::SpectralKernel;

/// `(ν, λ) = (σ²/2, σ²)`.
pub fn kpz_constants(sigma: f64) -> (f64, f64) {
    (0.5 * sigma * sigma, sigma * sigma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpzViews {
    /// `v = −∇h`, one component per spatial axis.
    pub burgers: Vec<GridFunction<f64>>,
    /// `φ = exp((λ/2ν) h)`.
    pub hopf_cole: GridFunction<f64>,
}

pub fn kpz_views(h: &GridFunction<f64>, sigma: f64) -> Result<KpzViews> {
    let (nu, lambda) = kpz_constants(sigma);
    let kernel = SpectralKernel::new(*h.grid())?;
    let burgers = (0..h.grid().dim())
        .map(|ax| kernel.derivative(h, 1, ax).map(|d| d.scaled(-1.0)))
        .collect::<Result<_>>()?;
    let r = lambda / (2.0 * nu);
    Ok(KpzViews { burgers, hopf_cole: h.map(|v| libm::exp(r * v)) })
}

/// Inverse Hopf–Cole map `h = (2ν/λ) log φ`; fails where `φ ≤ 0`.
pub fn height_from_hopf_cole(phi: &GridFunction<f64>, sigma: f64) -> Result<GridFunction<f64>> {
    if phi.data().iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter("Hopf-Cole inverse needs a positive field".into()));
    }
    let (nu, lambda) = kpz_constants(sigma);
    Ok(phi.map(|v| 2.0 * nu / lambda * libm::log(v)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction<f64>>,
}

/// Integrates one KPZ path driven by a realised smooth noise `gamma`
/// (spatial, or space-time with time as the last axis), by
/// integrating-factor RK4 with 2/3 de-aliasing of `|∇h|²`.
pub fn solve_kpz_pathwise(
    h0: &GridFunction<f64>,
    gamma: &GridFunction<f64>,
    sigma: f64,
    opts: &RunOptions,
) -> Result<PathTrajectory> {
    opts.validate()?;
    let grid = *h0.grid();
    if gamma.grid().spatial() != grid {
        return Err(Error::SpaceMismatch);
    }
    let (nu, lambda) = kpz_constants(sigma);
    let kernel = SpectralKernel::new(grid)?;
    let (steps, dt) = opts.steps();
    let e_half: Vec<Complex64> = kernel.heat_symbol(0.5 * dt, nu);
    let every = (steps / opts.snapshots).max(1);
    let mut u = alloc::vec![h0.clone()];
    let mut out = PathTrajectory { times: alloc::vec![0.0], states: alloc::vec![h0.clone()] };
    for n in 1..=steps {
        let t = (n - 1) as f64 * dt;
        u = if_rk4_step(&kernel, &e_half, &u, t, dt, |s, v| {
            let hd = kernel.dealias(&v[0]);
            let mut grad2 = GridFunction::zeros(grid);
            for ax in 0..grid.dim() {
                let d = kernel.derivative(&hd, 1, ax)?;
                for (o, &g) in grad2.data_mut().iter_mut().zip(d.data()) {
                    *o += g * g;
                }
            }
            let mut nl = kernel.dealias(&grad2).scaled(0.5 * lambda);
            for (o, &g) in nl.data_mut().iter_mut().zip(gamma.time_slice(s).data()) {
                *o += g;
            }
            Ok(alloc::vec![nl])
        })?;
        let sup = u[0].sup_norm();
        if !(sup <= opts.blowup) {
            return Err(Error::BlowUp { time: n as f64 * dt, sup, bound: opts.blowup });
        }
        if n % every == 0 || n == steps {
            out.times.push(n as f64 * dt);
            out.states.push(u[0].clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn constant_height() {
        let g = GridSpec::line(32, 10.0).unwrap();
        let v = kpz_views(&GridFunction::constant(g, 0.4), 1.3).unwrap();
        assert!(v.burgers[0].sup_norm() < 1e-14);
        assert!(v.hopf_cole.data().iter().all(|&p| (p - libm::exp(0.4)).abs() < 1e-15));
    }

    #[test]
    fn chain_rule() {
        let g = GridSpec::line(128, 2.0 * core::f64::consts::PI).unwrap();
        let h = GridFunction::from_fn(g, |x| 0.3 * libm::sin(x[0]) + 0.1 * libm::cos(2.0 * x[0]));
        let v = kpz_views(&h, 0.9).unwrap();
        let kernel = SpectralKernel::new(g).unwrap();
        let grad_phi = kernel.derivative(&v.hopf_cole, 1, 0).unwrap();
        let expect = GridFunction::from_data(
            g,
            v.hopf_cole.data().iter().zip(v.burgers[0].data()).map(|(p, b)| -p * b).collect(),
        )
        .unwrap();
        assert!(grad_phi.max_abs_diff(&expect) < 1e-12);
        let back = height_from_hopf_cole(&v.hopf_cole, 0.9).unwrap();
        assert!(back.max_abs_diff(&h) < 1e-14);
    }
}
