//! Wick-quantized heat equation with multiplicative noise,
//! `∂_t φ = ½σ² Δφ + φ ⋄ Γ`.
//!
//! Strang splitting: exact spectral heat half-steps around an RK4 step of the
//! noise source `(Γ ⋄ φ)_γ = Σ_{α+β=γ} Γ_α φ_β`.

use super::{
    check_noise, drive, noise_convolution, noise_slices, rk4_step, Equation, History, PropagatorSystem, RealField,
    RunOptions,
};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::spectral::SpectralKernel;

pub fn solve_heat_wick(noise: &RealField, phi0: &RealField, sigma: f64, opts: &RunOptions) -> Result<History<f64>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("sigma = {sigma} must be positive")));
    }
    opts.validate()?;
    let grid = *phi0.space();
    check_noise(noise, phi0.index_set(), &grid, phi0.basis())?;
    let kernel = SpectralKernel::new(grid)?;
    let set = phi0.index_set().clone();
    let (_, dt) = opts.steps();
    let half = kernel.heat_symbol(0.5 * dt, 0.5 * sigma * sigma);
    let sys = PropagatorSystem::from_field(Equation::Heat, phi0, dt);
    drive(sys, opts, |sys| {
        let t = sys.time;
        let u: alloc::vec::Vec<GridFunction<f64>> = sys.state.iter().map(|c| kernel.apply_diagonal(c, &half)).collect();
        let u = rk4_step(&u, t, sys.dt, |s, v| Ok(noise_convolution(&noise_slices(noise, s), v, &set, false).0))?;
        sys.state = u.iter().map(|c| kernel.apply_diagonal(c, &half)).collect();
        let (_, dropped) = noise_convolution(&noise_slices(noise, t + sys.dt), &sys.state, &set, true);
        sys.overflow += sys.dt * dropped;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{BasisTag, ChaosField};
    use crate::grid::GridSpec;
    use crate::multiindex::{IndexSet, MultiIndex};
    use alloc::sync::Arc;

    #[test]
    fn gaussian_decay_matches_closed_form() {
        let g = GridSpec::line(256, 40.0).unwrap();
        let set = Arc::new(IndexSet::enumerate(1, 1));
        let sigma = 1.2;
        let phi = ChaosField::deterministic(
            set.clone(),
            GridFunction::from_fn(g, |x| libm::exp(-x[0] * x[0] / 2.0)),
            BasisTag::GaussianHermite,
        );
        let noise = ChaosField::zero(set, g, BasisTag::GaussianHermite);
        let t = 0.8;
        let h = solve_heat_wick(&noise, &phi, sigma, &RunOptions::new(t, 0.1)).unwrap();
        let s2 = 1.0 + sigma * sigma * t;
        let expect = GridFunction::from_fn(g, |x| libm::exp(-x[0] * x[0] / (2.0 * s2)) / libm::sqrt(s2));
        assert!(h.final_field().coeff_at(0).unwrap().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn constant_potential_factorises() {
        let g = GridSpec::line(64, 20.0).unwrap();
        let set = Arc::new(IndexSet::enumerate(4, 1));
        let c = 0.7;
        let noise = ChaosField::single(set.clone(), &MultiIndex::unit(0), GridFunction::constant(g, c), BasisTag::GaussianHermite).unwrap();
        let phi = ChaosField::deterministic(set.clone(), GridFunction::constant(g, 1.0), BasisTag::GaussianHermite);
        let h = solve_heat_wick(&noise, &phi, 1.0, &RunOptions::new(1.0, 0.01)).unwrap();
        // φ = exp^⋄(c t H_{ε₁}) ⇒ φ_{nε₁} = (c t)^n / n!.
        let mut fact = 1.0;
        for n in 0..=4u32 {
            if n > 0 {
                fact *= n as f64;
            }
            let v = h.final_field().coeff(&MultiIndex::scaled_unit(0, n)).unwrap().data()[7];
            assert!((v - libm::pow(c, n as f64) / fact).abs() < 1e-9, "n = {n}: {v}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = GridSpec::line(8, 1.0).unwrap();
        let set = Arc::new(IndexSet::enumerate(1, 1));
        let phi = ChaosField::deterministic(set.clone(), GridFunction::constant(g, 1.0), BasisTag::GaussianHermite);
        let noise = ChaosField::zero(set, g, BasisTag::GaussianHermite);
        assert!(solve_heat_wick(&noise, &phi, 0.0, &RunOptions::new(1.0, 0.1)).is_err());
        assert!(solve_heat_wick(&noise, &phi, 1.0, &RunOptions::new(1.0, -0.1)).is_err());
        let other = ChaosField::zero(Arc::new(IndexSet::enumerate(1, 1)), GridSpec::line(16, 1.0).unwrap(), BasisTag::GaussianHermite);
        assert_eq!(solve_heat_wick(&other, &phi, 1.0, &RunOptions::new(1.0, 0.1)).unwrap_err(), Error::SpaceMismatch);
    }
}
