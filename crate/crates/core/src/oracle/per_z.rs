//! Per-`z` deterministic solves of the transformed equations.
//!
//! The Hermite transform turns every Wick product into an ordinary one, so
//! at fixed `z` each quantized equation is a deterministic PDE with potential
//! `V(x, t) = ℋΓ(x, t, z)`. These are integrated by Crank–Nicolson (implicit
//! trapezoid) in time and sixth-order central differences in space. The
//! difference operators are circulant, so the implicit linear part is
//! inverted through their Fourier symbols; remaining terms are resolved by
//! fixed-point iteration.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::noise::potential_at;
use crate::solvers::{ComplexField, Equation, RealField, RunOptions};
use crate::spectral::SpectralKernel;

type Cgf = GridFunction<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZParams {
    /// Heat diffusion `½σ²`.
    pub sigma: f64,
    /// Nonlinear-heat power.
    pub power: u32,
}

impl Default for ZParams {
    fn default() -> Self {
        Self { sigma: 1.0, power: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Cgf>,
}

impl ZTrajectory {
    pub fn final_state(&self) -> &Cgf {
        self.states.last().expect("a trajectory holds the initial state")
    }
}

/// `ℋF(·, z)` of a chaos field on its grid.
pub fn transform_at(field: &ComplexField, z: &[Complex64]) -> Cgf {
    field.hermite_transform_eval(z)
}

/// Solves the transformed equation `equation` at `z` from `ℋ initial(z)`.
///
/// Initial data is the solution's initial field (`Γ₀` for the Schrödinger
/// equations). Noise is ignored by the noise-free equations.
pub fn solve_deterministic_at_z(
    equation: Equation,
    z: &[Complex64],
    noise: &RealField,
    initial: &ComplexField,
    params: ZParams,
    opts: &RunOptions,
) -> Result<ZTrajectory> {
    if equation == Equation::Kpz {
        return Err(Error::UnsupportedEquation("kpz"));
    }
    opts.validate()?;
    let grid = *initial.space();
    let kernel = SpectralKernel::new(grid)?;
    let u0 = transform_at(initial, z);
    let fd = FiniteDifference::new(&kernel);
    let k2 = fd.laplacian.clone();
    let symbol_from = |f: &dyn Fn(f64) -> Complex64| -> Vec<Complex64> { k2.iter().map(|&k| f(k)).collect() };
    let potential = |t: f64| potential_at(noise, z, t);
    let product = |a: &Cgf, b: &Cgf| -> Cgf {
        GridFunction::from_data(grid, a.data().iter().zip(b.data()).map(|(x, y)| x * y).collect()).expect("same grid")
    };
    match equation {
        Equation::Heat => {
            let nu = 0.5 * params.sigma * params.sigma;
            let l = symbol_from(&|k2| Complex64::new(-nu * k2, 0.0));
            crank_nicolson(&kernel, &l, alloc::vec![u0], opts, |t, u| Ok(alloc::vec![product(&potential(t), &u[0])]))
        }
        Equation::Transport => {
            if grid.dim() != 1 {
                return Err(Error::DimensionMismatch("per-z transport is 1-D".into()));
            }
            let l = alloc::vec![Complex64::new(0.0, 0.0); grid.len()];
            crank_nicolson(&kernel, &l, alloc::vec![u0], opts, |t, u| {
                let du = fd.d1(&kernel, &u[0]);
                Ok(alloc::vec![product(&potential(t), &du).scaled(-1.0)])
            })
        }
        Equation::SchrodingerAdditive => {
            let l = symbol_from(&|k2| Complex64::new(0.0, -k2));
            crank_nicolson(&kernel, &l, alloc::vec![u0], opts, |t, _| Ok(alloc::vec![potential(t).map(|v| -I * v)]))
        }
        Equation::SchrodingerMult => {
            let l = symbol_from(&|k2| Complex64::new(0.0, -k2));
            crank_nicolson(&kernel, &l, alloc::vec![u0], opts, |t, u| {
                Ok(alloc::vec![product(&potential(t), &u[0]).map(|v| I * v)])
            })
        }
        Equation::Nls => {
            // (ℋψ(z), ℋψ(z̄)): the transform of ψ* at z is conj ℋψ(z̄).
            let zb: Vec<Complex64> = z.iter().map(|c| c.conj()).collect();
            let b0 = transform_at(initial, &zb);
            let l = symbol_from(&|k2| Complex64::new(0.0, -k2));
            crank_nicolson(&kernel, &l, alloc::vec![u0, b0], opts, |t, u| {
                let (va, vb) = (potential(t), potential_at(noise, &zb, t));
                let (a, b) = (&u[0], &u[1]);
                let cube = |p: &Cgf, q: &Cgf| product(&product(p, p), &q.map(|v| v.conj()));
                let na = product(&va, &u[0]).data().iter().zip(cube(a, b).data()).map(|(x, y)| I * (x - y)).collect();
                let nb = product(&vb, &u[1]).data().iter().zip(cube(b, a).data()).map(|(x, y)| I * (x - y)).collect();
                Ok(alloc::vec![GridFunction::from_data(grid, na)?, GridFunction::from_data(grid, nb)?])
            })
        }
        Equation::NonlinearHeat => {
            if !(2..=3).contains(&params.power) {
                return Err(Error::InvalidParameter(alloc::format!("nonlinearity power {} not in {{2, 3}}", params.power)));
            }
            let l = symbol_from(&|k2| Complex64::new(-k2, 0.0));
            crank_nicolson(&kernel, &l, alloc::vec![u0], opts, |_, u| {
                Ok(alloc::vec![u[0].map(|v| -v.powu(params.power))])
            })
        }
        Equation::Kdv | Equation::BenjaminOno => {
            if grid.dim() != 1 {
                return Err(Error::DimensionMismatch("per-z KdV/BO is 1-D".into()));
            }
            // KdV: −∂³ ≈ −D₁³; BO: −H∂² ≈ −sign(k)·i·(−D₂).
            let l: Vec<Complex64> = if equation == Equation::Kdv {
                fd.first.iter().map(|&d| Complex64::new(0.0, d * d * d)).collect()
            } else {
                fd.first.iter().zip(&fd.laplacian).map(|(&d, &k2)| Complex64::new(0.0, -d.signum() * k2)).collect()
            };
            crank_nicolson(&kernel, &l, alloc::vec![u0], opts, |_, u| {
                Ok(alloc::vec![fd.d1(&kernel, &product(&u[0], &u[0])).scaled(-0.5)])
            })
        }
        Equation::Kpz => unreachable!("rejected above"),
    }
}

/// `(1 − ½hL) ûⁿ⁺¹ = (1 + ½hL) ûⁿ + ½h (N̂ⁿ + N̂ⁿ⁺¹)`, iterated on `Nⁿ⁺¹`.
fn crank_nicolson(
    kernel: &SpectralKernel,
    l: &[Complex64],
    init: Vec<Cgf>,
    opts: &RunOptions,
    mut nonlinear: impl FnMut(f64, &[Cgf]) -> Result<Vec<Cgf>>,
) -> Result<ZTrajectory> {
    let (steps, h) = opts.steps();
    let every = (steps / opts.snapshots).max(1);
    let plus: Vec<Complex64> = l.iter().map(|&v| 1.0 + 0.5 * h * v).collect();
    let inv_minus: Vec<Complex64> = l.iter().map(|&v| 1.0 / (1.0 - 0.5 * h * v)).collect();
    let mut u = init;
    let mut out = ZTrajectory { times: alloc::vec![0.0], states: alloc::vec![u[0].clone()] };
    for n in 1..=steps {
        let t = (n - 1) as f64 * h;
        let nn = nonlinear(t, &u)?;
        let known: Vec<Vec<Complex64>> = u
            .iter()
            .zip(&nn)
            .map(|(uc, nc)| {
                let (su, sn) = (kernel.spectrum(uc), kernel.spectrum(nc));
                su.iter().zip(&sn).zip(&plus).map(|((a, b), p)| p * a + 0.5 * h * b).collect()
            })
            .collect();
        let mut guess: Vec<Cgf> = u.iter().zip(&nn).map(|(uc, nc)| axpy(uc, h, nc)).collect();
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let nk = nonlinear(t + h, &guess)?;
            let next: Vec<Cgf> = known
                .iter()
                .zip(&nk)
                .map(|(kn, nc)| {
                    let sn = kernel.spectrum(nc);
                    let s = kn.iter().zip(&sn).zip(&inv_minus).map(|((a, b), m)| m * (a + 0.5 * h * b)).collect();
                    kernel.synthesize(s)
                })
                .collect();
            let change = next.iter().zip(&guess).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
            let size = next.iter().map(GridFunction::sup_norm).fold(0.0, f64::max);
            guess = next;
            if !(size.is_finite()) {
                return Err(Error::BlowUp { time: t + h, sup: size, bound: opts.blowup });
            }
            if change <= 1e-14 * (1.0 + size) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence(t + h));
        }
        u = guess;
        let sup = u.iter().map(GridFunction::sup_norm).fold(0.0, f64::max);
        if !(sup <= opts.blowup) {
            return Err(Error::BlowUp { time: t + h, sup, bound: opts.blowup });
        }
        if n % every == 0 || n == steps {
            out.times.push(n as f64 * h);
            out.states.push(u[0].clone());
        }
    }
    Ok(out)
}

/// Symbols of the sixth-order central stencils
/// `(−1, 9, −45, 0, 45, −9, 1)/60h` and `(2, −27, 270, −490, 270, −27, 2)/180h²`.
struct FiniteDifference {
    /// `d(k)` with `D₁ e^{ikx} = i d(k) e^{ikx}` along axis 0.
    first: Vec<f64>,
    /// `λ(k) ≥ 0` with `D₂ e^{ik·x} = −λ(k) e^{ik·x}`, summed over axes.
    laplacian: Vec<f64>,
}

impl FiniteDifference {
    fn new(kernel: &SpectralKernel) -> Self {
        let grid = *kernel.grid();
        let h: Vec<f64> = grid.axes().iter().map(|a| a.spacing()).collect();
        let d1 = |k: f64, h: f64| {
            let t = k * h;
            (90.0 * libm::sin(t) - 18.0 * libm::sin(2.0 * t) + 2.0 * libm::sin(3.0 * t)) / (60.0 * h)
        };
        let d2 = |k: f64, h: f64| {
            let t = k * h;
            -(4.0 * libm::cos(3.0 * t) - 54.0 * libm::cos(2.0 * t) + 540.0 * libm::cos(t) - 490.0) / (180.0 * h * h)
        };
        let mut first = Vec::with_capacity(grid.len());
        let mut laplacian = Vec::with_capacity(grid.len());
        for flat in 0..grid.len() {
            let k = kernel.wavevector(flat);
            first.push(d1(k[0], h[0]));
            laplacian.push((0..grid.dim()).map(|ax| d2(k[ax], h[ax])).sum());
        }
        Self { first, laplacian }
    }

    fn d1(&self, kernel: &SpectralKernel, u: &Cgf) -> Cgf {
        kernel.apply(u, |flat| Complex64::new(0.0, self.first[flat]))
    }
}

fn axpy(y: &Cgf, a: f64, x: &Cgf) -> Cgf {
    GridFunction::from_data(*y.grid(), y.data().iter().zip(x.data()).map(|(p, q)| p + q * a).collect()).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{BasisTag, ChaosField};
    use crate::grid::GridSpec;
    use crate::multiindex::{IndexSet, MultiIndex};
    use crate::solvers::eval_transport_characteristic;
    use alloc::sync::Arc;

    fn complex(f: &RealField) -> ComplexField {
        f.map(*f.space(), |c| c.to_complex())
    }

    #[test]
    fn heat_with_constant_potential_factorises() {
        let g = GridSpec::line(128, 20.0).unwrap();
        let set = Arc::new(IndexSet::enumerate(1, 1));
        let c = 0.8;
        let noise = ChaosField::single(set.clone(), &MultiIndex::unit(0), GridFunction::constant(g, c), BasisTag::GaussianHermite).unwrap();
        let phi = ChaosField::deterministic(set, GridFunction::from_fn(g, |x| libm::exp(-x[0] * x[0] / 2.0)), BasisTag::GaussianHermite);
        let z = [Complex64::new(0.5, 0.0)];
        let t = 0.5;
        let r = solve_deterministic_at_z(Equation::Heat, &z, &noise, &complex(&phi), ZParams::default(), &RunOptions::new(t, 1e-3)).unwrap();
        let s2 = 1.0 + t;
        let want = GridFunction::from_fn(g, |x| Complex64::new(libm::exp(0.5 * c * t - x[0] * x[0] / (2.0 * s2)) / libm::sqrt(s2), 0.0));
        assert!(r.final_state().max_abs_diff(&want) < 1e-6);
    }

    #[test]
    fn zero_z_is_the_noise_free_solution() {
        let g = GridSpec::line(64, 20.0).unwrap();
        let set = Arc::new(IndexSet::enumerate(2, 1));
        let noise = ChaosField::single(set.clone(), &MultiIndex::unit(0), GridFunction::constant(g, 3.0), BasisTag::GaussianHermite).unwrap();
        let psi = complex(&ChaosField::deterministic(set.clone(), GridFunction::from_fn(g, |x| libm::exp(-x[0] * x[0])), BasisTag::GaussianHermite));
        let z = [Complex64::new(0.0, 0.0)];
        let zero = ChaosField::zero(set, g, BasisTag::GaussianHermite);
        let opts = RunOptions::new(0.2, 0.01);
        let a = solve_deterministic_at_z(Equation::SchrodingerMult, &z, &noise, &psi, ZParams::default(), &opts).unwrap();
        let b = solve_deterministic_at_z(Equation::SchrodingerMult, &z, &zero, &psi, ZParams::default(), &opts).unwrap();
        assert!(a.final_state().max_abs_diff(b.final_state()) < 1e-15);
    }

    #[test]
    fn transport_matches_the_characteristic_formula() {
        let l = 2.0 * core::f64::consts::PI;
        let g = GridSpec::line(64, l).unwrap();
        let gt = g.with_time(32, 1.0).unwrap();
        let set = Arc::new(IndexSet::enumerate(1, 1));
        let speed = GridFunction::from_fn(gt, |x| 0.5 + 0.5 * libm::sin(2.0 * core::f64::consts::PI * x[1]));
        let noise = ChaosField::single(set.clone(), &MultiIndex::unit(0), speed, BasisTag::GaussianHermite).unwrap();
        let phi = ChaosField::deterministic(set, GridFunction::from_fn(g, |x| libm::exp(libm::sin(x[0]))), BasisTag::GaussianHermite);
        let z = [Complex64::new(0.3, 0.2)];
        let t = 0.75;
        let r = solve_deterministic_at_z(Equation::Transport, &z, &noise, &complex(&phi), ZParams::default(), &RunOptions::new(t, 1e-3)).unwrap();
        for i in [0, 17, 40] {
            let x = g.axis(0).coordinate(i);
            let want = eval_transport_characteristic(x, t, &z, &noise, &phi).unwrap();
            assert!((r.final_state().data()[i] - want).norm() < 1e-5, "{i}");
        }
    }

    #[test]
    fn kpz_is_rejected() {
        let g = GridSpec::line(8, 1.0).unwrap();
        let set = Arc::new(IndexSet::enumerate(1, 1));
        let f = ChaosField::zero(set, g, BasisTag::GaussianHermite);
        let e = solve_deterministic_at_z(Equation::Kpz, &[], &f, &complex(&f), ZParams::default(), &RunOptions::new(1.0, 0.1));
        assert_eq!(e.unwrap_err(), Error::UnsupportedEquation("kpz"));
    }
}
