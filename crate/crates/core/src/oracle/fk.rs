//! Feynman–Kac Monte Carlo for the transformed heat equation
//! `∂_t φ̃ = ½σ²Δφ̃ + ℋΓ(·, ·, z) φ̃` on the periodic box:
//! `φ̃(x, t) = E[ℋΓ₀(x + σB_t, z) exp(∫₀ᵗ ℋΓ(x + σB_s, t − s, z) ds)]`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::grid::{GridFunction, GridSpec};
use crate::noise::substream;
use crate::par::map_indexed;
use crate::solvers::RealField;

const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkOptions {
    pub paths: usize,
    pub seed: u64,
    /// Euler–Maruyama step of the Brownian paths.
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkEstimate {
    pub value: Complex64,
    /// `√((Var Re + Var Im) / M)`.
    pub std_error: f64,
    pub paths: usize,
}

/// Estimates `φ̃(x, t)` at `z`. `initial` is `Γ₀` on the spatial grid,
/// `noise` is `Γ` (spatial or space-time). Fields are interpolated cubically
/// in space and linearly in time; the exponent uses left-point quadrature.
pub fn feynman_kac_mc(
    z: &[Complex64],
    noise: &RealField,
    initial: &RealField,
    sigma: f64,
    x: &[f64],
    t: f64,
    opts: &FkOptions,
) -> FkEstimate {
    let grid = *initial.space();
    let phi0 = initial.hermite_transform_eval(z);
    let potential = noise.hermite_transform_eval(z);
    let ngrid = *noise.space();
    let steps = libm::ceil(t / opts.dt - 1e-9).max(1.0) as usize;
    let h = t / steps as f64;
    let sq = sigma * libm::sqrt(h);
    let blocks = opts.paths.div_ceil(BLOCK);
    let dim = grid.dim();
    let sums = map_indexed(blocks, |b| {
        let mut rng = substream(opts.seed, b as u64);
        let count = BLOCK.min(opts.paths - b * BLOCK);
        let (mut s, mut s_re2, mut s_im2) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        let mut pos = [0.0; 2];
        for _ in 0..count {
            pos[..dim].copy_from_slice(&x[..dim]);
            let mut exponent = Complex64::new(0.0, 0.0);
            for j in 0..steps {
                exponent += h * interp(&potential, &ngrid, &pos[..dim], t - j as f64 * h);
                for p in pos[..dim].iter_mut() {
                    let xi: f64 = StandardNormal.sample(&mut rng);
                    *p += sq * xi;
                }
            }
            let v = interp(&phi0, &grid, &pos[..dim], 0.0) * exponent.exp();
            s += v;
            s_re2 += v.re * v.re;
            s_im2 += v.im * v.im;
        }
        (s, s_re2, s_im2)
    });
    let m = opts.paths as f64;
    let (mut s, mut re2, mut im2) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
    for (a, b, c) in sums {
        s += a;
        re2 += b;
        im2 += c;
    }
    let mean = s / m;
    let var = (re2 / m - mean.re * mean.re) + (im2 / m - mean.im * mean.im);
    FkEstimate { value: mean, std_error: libm::sqrt(var.max(0.0) * m / (m - 1.0) / m), paths: opts.paths }
}

/// Tensor four-point Lagrange interpolation over the spatial axes and
/// linear interpolation in time (periodic in both).
fn interp(f: &GridFunction<Complex64>, grid: &GridSpec, x: &[f64], t: f64) -> Complex64 {
    let spatial = grid.spatial();
    let m = spatial.len();
    let (t0, t1, wt) = match grid.time_axis() {
        Some(ta) => {
            let axis = grid.axis(ta);
            let p = axis.wrapped_position(t);
            let i = libm::floor(p) as usize;
            (i % axis.nodes, (i + 1) % axis.nodes, p - libm::floor(p))
        }
        None => (0, 0, 0.0),
    };
    let mut stencil: Vec<(usize, f64)> = alloc::vec![(0, 1.0)];
    for (ax, &xa) in x.iter().enumerate() {
        let axis = spatial.axis(ax);
        let p = axis.wrapped_position(xa);
        let i = libm::floor(p) as isize;
        let w = p - libm::floor(p);
        let lw = [
            -w * (w - 1.0) * (w - 2.0) / 6.0,
            (w + 1.0) * (w - 1.0) * (w - 2.0) / 2.0,
            -(w + 1.0) * w * (w - 2.0) / 2.0,
            (w + 1.0) * w * (w - 1.0) / 6.0,
        ];
        let stride = spatial.stride(ax);
        let n = axis.nodes as isize;
        stencil = stencil
            .iter()
            .flat_map(|&(off, c)| {
                (0..4).map(move |o| (off + (i + o as isize - 1).rem_euclid(n) as usize * stride, c * lw[o]))
            })
            .collect();
    }
    let at = |slab: usize| stencil.iter().map(|&(off, c)| f.data()[slab * m + off] * c).sum::<Complex64>();
    if wt == 0.0 {
        at(t0)
    } else {
        at(t0) * (1.0 - wt) + at(t1) * wt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{BasisTag, ChaosField};
    use crate::multiindex::{IndexSet, MultiIndex};
    use alloc::sync::Arc;

    fn setup(c: f64) -> (RealField, RealField, GridSpec) {
        let g = GridSpec::line(128, 20.0).unwrap();
        let set = Arc::new(IndexSet::enumerate(1, 1));
        let noise = ChaosField::single(set.clone(), &MultiIndex::unit(0), GridFunction::constant(g, c), BasisTag::GaussianHermite).unwrap();
        let phi = ChaosField::deterministic(set, GridFunction::from_fn(g, |x| libm::exp(-x[0] * x[0] / 2.0)), BasisTag::GaussianHermite);
        (noise, phi, g)
    }

    #[test]
    fn zero_potential_is_heat_kernel_smoothing() {
        let (noise, phi, _) = setup(0.0);
        let z = [Complex64::new(1.0, 0.0)];
        let t = 0.5;
        let e = feynman_kac_mc(&z, &noise, &phi, 1.0, &[0.3], t, &FkOptions { paths: 20_000, seed: 7, dt: 0.05 });
        let want = libm::exp(-0.09 / (2.0 * (1.0 + t))) / libm::sqrt(1.0 + t);
        assert!((e.value.re - want).abs() <= 3.0 * e.std_error, "{} vs {want} ± {}", e.value.re, e.std_error);
    }

    #[test]
    fn constant_potential_scales_the_estimate() {
        let z = [Complex64::new(0.5, 0.0)];
        let opts = FkOptions { paths: 5_000, seed: 3, dt: 0.1 };
        let (n0, phi, _) = setup(0.0);
        let (n1, _, _) = setup(0.8);
        let a = feynman_kac_mc(&z, &n0, &phi, 1.0, &[0.0], 0.5, &opts);
        let b = feynman_kac_mc(&z, &n1, &phi, 1.0, &[0.0], 0.5, &opts);
        // Same seed, same paths: the exponent is the deterministic 0.4 · 0.5.
        assert!((b.value - a.value * libm::exp(0.2)).norm() < 1e-12);
    }

    #[test]
    fn error_scales_like_inverse_root_m() {
        let (noise, phi, _) = setup(0.0);
        let z = [Complex64::new(0.0, 0.0)];
        let run = |m| feynman_kac_mc(&z, &noise, &phi, 1.0, &[0.0], 0.5, &FkOptions { paths: m, seed: 11, dt: 0.5 });
        let ratio = run(4_000).std_error / run(16_000).std_error;
        assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
        let a = run(3000);
        assert_eq!(a, run(3000));
    }

    #[test]
    fn interpolation_is_exact_for_cubics_and_linear_in_time() {
        let g = GridSpec::line(64, 64.0).unwrap().with_time(8, 1.0).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::new(0.01 * x[0] * x[0] * x[0] - x[0], 0.0) * (1.0 + x[1]));
        let v = interp(&f, &g, &[3.3], 0.3);
        let want = (0.01 * 3.3f64.powi(3) - 3.3) * 1.3;
        assert!((v.re - want).abs() < 1e-10);
    }
}
