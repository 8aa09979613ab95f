//! Stochastic Schrödinger equations driven by a real noise `Γ`.
//!
//! Additive: `ψ_t = iΔψ − iΓ`, advanced per coefficient by the exponential
//! midpoint rule `ψⁿ⁺¹ = S(Δt)ψⁿ − iΔt S(Δt/2) Γ(t_{n+½})` with the free
//! group `S(t) = e^{itΔ}`.
//!
//! Multiplicative (Wick): `∂_t ψ_γ = iΔψ_γ + i Σ_{α+β=γ} Γ_α ψ_β`. The
//! zero-index potential is folded into a Strang-split unitary step; the
//! lower-degree coupling enters as a midpoint source, so levels are solved
//! in increasing degree.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{check_noise, drive, noise_slices, ComplexField, Equation, History, PropagatorSystem, RealField, RunOptions};
use crate::error::Result;
use crate::grid::GridFunction;
use crate::par::map_indexed;
use crate::spectral::SpectralKernel;

type Cgf = GridFunction<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn solve_schrodinger_additive(noise: &RealField, psi0: &ComplexField, opts: &RunOptions) -> Result<History<Complex64>> {
    opts.validate()?;
    let grid = *psi0.space();
    check_noise(noise, psi0.index_set(), &grid, psi0.basis())?;
    let kernel = SpectralKernel::new(grid)?;
    let set = psi0.index_set().clone();
    let (_, dt) = opts.steps();
    let full = kernel.schrodinger_symbol(dt);
    let half = kernel.schrodinger_symbol(0.5 * dt);
    // Noise coefficients outside the solution set are never representable.
    let outside: Vec<&GridFunction<f64>> =
        noise.iter().filter(|(_, a, _)| !set.contains(a)).map(|(_, _, c)| c).collect();
    let sys = PropagatorSystem::from_field(Equation::SchrodingerAdditive, psi0, dt);
    drive(sys, opts, |sys| {
        let tm = sys.time + 0.5 * sys.dt;
        let forcing = noise_slices(noise, tm);
        let mut next: Vec<Cgf> = sys.state.iter().map(|c| kernel.apply_diagonal(c, &full)).collect();
        for (alpha, g) in &forcing {
            let Some(p) = set.position(alpha) else { continue };
            let kick = kernel.apply_diagonal(&g.to_complex(), &half);
            for (o, &k) in next[p].data_mut().iter_mut().zip(kick.data()) {
                *o -= I * k * sys.dt;
            }
        }
        for g in &outside {
            sys.overflow += sys.dt * g.time_slice(tm).l2_norm();
        }
        sys.state = next;
        Ok(())
    })
}

pub fn solve_schrodinger_mult_wick(noise: &RealField, psi0: &ComplexField, opts: &RunOptions) -> Result<History<Complex64>> {
    opts.validate()?;
    let grid = *psi0.space();
    check_noise(noise, psi0.index_set(), &grid, psi0.basis())?;
    let kernel = SpectralKernel::new(grid)?;
    let set = psi0.index_set().clone();
    let (_, dt) = opts.steps();
    let half = kernel.schrodinger_symbol(0.5 * dt);
    let back = kernel.schrodinger_symbol(-0.5 * dt);
    let sys = PropagatorSystem::from_field(Equation::SchrodingerMult, psi0, dt);
    drive(sys, opts, |sys| {
        let tm = sys.time + 0.5 * sys.dt;
        let slices = noise_slices(noise, tm);
        let v0 = slices.iter().find(|(a, _)| a.is_zero()).map(|(_, g)| g.clone());
        let phase = |tau: f64| -> Option<Cgf> { v0.as_ref().map(|v| v.map(|x| crate::scalar::cis(x * tau))) };
        let (p_full, p_half) = (phase(sys.dt), phase(0.5 * sys.dt));
        let mul = |u: &Cgf, p: &Option<Cgf>| -> Cgf {
            match p {
                None => u.clone(),
                Some(p) => GridFunction::from_data(grid, u.data().iter().zip(p.data()).map(|(a, b)| a * b).collect())
                    .expect("same grid"),
            }
        };
        let fwd: Vec<Cgf> = sys.state.iter().map(|c| kernel.apply_diagonal(c, &half)).collect();
        let mut next: Vec<Cgf> = fwd.iter().map(|c| kernel.apply_diagonal(&mul(c, &p_full), &half)).collect();
        let mut mid: Vec<Option<Cgf>> = alloc::vec![None; set.len()];
        for d in 0..=set.max_degree() {
            let range = set.level(d);
            let level = map_indexed(range.len(), |off| {
                let p = range.start + off;
                let gamma = &set.members()[p];
                let mut src = GridFunction::<Complex64>::zeros(grid);
                let mut any = false;
                for (alpha, g) in &slices {
                    if alpha.is_zero() || alpha.degree() > gamma.degree() {
                        continue;
                    }
                    let Some(beta) = gamma.sub_checked(alpha) else { continue };
                    let Some(q) = set.position(&beta) else { continue };
                    let Some(m) = &mid[q] else { continue };
                    for ((o, &gv), &mv) in src.data_mut().iter_mut().zip(g.data()).zip(m.data()) {
                        *o += I * mv * gv;
                    }
                    any = true;
                }
                let mut out = next[p].clone();
                if any {
                    let kick = kernel.apply_diagonal(&mul(&src, &p_half), &half);
                    for (o, &k) in out.data_mut().iter_mut().zip(kick.data()) {
                        *o += k * sys.dt;
                    }
                }
                let b = kernel.apply_diagonal(&out, &back);
                let m = GridFunction::from_data(
                    grid,
                    fwd[p].data().iter().zip(b.data()).map(|(x, y)| (x + y) * 0.5).collect(),
                )
                .expect("same grid");
                (out, m)
            });
            for (off, (out, m)) in level.into_iter().enumerate() {
                next[range.start + off] = out;
                mid[range.start + off] = Some(m);
            }
        }
        for (alpha, g) in &slices {
            for (q, beta) in set.members().iter().enumerate() {
                if alpha.is_zero() || set.contains(&alpha.add(beta)) {
                    continue;
                }
                let s: f64 = g.data().iter().zip(next[q].data()).map(|(a, b)| (b * a).norm_sqr()).sum();
                sys.overflow += sys.dt * libm::sqrt(s * grid.cell_volume());
            }
        }
        sys.state = next;
        Ok(())
    })
}
