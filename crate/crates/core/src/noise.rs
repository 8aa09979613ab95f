//! White noise, Brownian sheet, smoothing and reproducible path sampling.
//!
//! The `k`-th noise coefficient is the tensor Hermite function `η_k` over the
//! noise's parameter axes (space, plus time when `time_extended`), pulled back
//! to the periodic box by an affine [`Chart`]. No Jacobian factor is applied:
//! the noise is white in chart coordinates.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::chaos::{BasisTag, ChaosField, Coefficient};
use crate::error::{Error, Result};
use crate::grid::{AxisRole, GridFunction, GridSpec};
use crate::hermite::{hermite_fn_integral_table, BasisEvaluator};
use crate::multiindex::{IndexSet, MultiIndex};
use crate::spectral::SpectralKernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    Gaussian,
    Poisson,
}

/// Map from a periodic axis to the real line on which `η_k` lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Centre of the axis to 0, half-width to `√(2·max_order) + 8`, so that
    /// every basis function used is below `1e-12` at the box edge.
    Fitted,
    /// Physical coordinates are used unchanged.
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub space_dim: usize,
    pub time_extended: bool,
    pub basis_count: usize,
    pub gamma: f64,
    pub seed: u64,
    pub chart: Chart,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, space_dim: usize, basis_count: usize) -> Self {
        Self { kind, space_dim, time_extended: false, basis_count, gamma: 0.0, seed: 0, chart: Chart::Fitted }
    }

    pub fn time_extended(mut self, on: bool) -> Self {
        self.time_extended = on;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_chart(mut self, chart: Chart) -> Self {
        self.chart = chart;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.basis_count == 0 {
            return Err(Error::InvalidParameter("noise basis count must be at least 1".into()));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("smoothing exponent {} must be >= 0", self.gamma)));
        }
        if !(1..=2).contains(&self.space_dim) {
            return Err(Error::InvalidParameter(alloc::format!("noise space dimension {} not in 1..=2", self.space_dim)));
        }
        Ok(())
    }

    /// Number of parameter axes of `η_k`.
    pub fn param_dim(&self) -> usize {
        self.space_dim + usize::from(self.time_extended)
    }

    pub fn basis(&self) -> BasisEvaluator {
        BasisEvaluator::new(self.param_dim(), self.basis_count)
    }

    /// Index set `K = 1, N = basis_count` that holds the noise exactly.
    pub fn index_set(&self) -> Arc<IndexSet> {
        Arc::new(IndexSet::enumerate(1, self.basis_count))
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        self.validate()?;
        let has_time = grid.time_axis().is_some();
        if grid.dim() != self.param_dim() || has_time != self.time_extended || grid.space_dim() != self.space_dim {
            return Err(Error::DimensionMismatch(alloc::format!(
                "noise over {} space axes{} on a grid with {} axes ({} spatial)",
                self.space_dim,
                if self.time_extended { " and time" } else { "" },
                grid.dim(),
                grid.space_dim()
            )));
        }
        if let Some(t) = grid.time_axis() {
            if t != grid.dim() - 1 {
                return Err(Error::DimensionMismatch("the time axis must be the last grid axis".into()));
            }
        }
        Ok(())
    }

    /// Affine charts `y = scale·(x − centre)` for every grid axis.
    pub fn charts(&self, grid: &GridSpec) -> Vec<AffineChart> {
        let max_order = self.basis().max_order() as f64;
        grid.axes()
            .iter()
            .map(|a| match self.chart {
                Chart::Identity => AffineChart { centre: 0.0, scale: 1.0 },
                Chart::Fitted => {
                    AffineChart { centre: a.center(), scale: (libm::sqrt(2.0 * max_order) + 8.0) / (0.5 * a.length) }
                }
            })
            .collect()
    }

    /// `η_k` at a physical point (1-based `k`), through the chart.
    pub fn eta(&self, k: usize, point: &[f64], grid: &GridSpec) -> Result<f64> {
        let charts = self.charts(grid);
        let y: Vec<f64> = point.iter().zip(&charts).map(|(&x, c)| c.apply(x)).collect();
        self.basis().eval(k, &y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineChart {
    pub centre: f64,
    pub scale: f64,
}

impl AffineChart {
    pub fn apply(&self, x: f64) -> f64 {
        self.scale * (x - self.centre)
    }
}

fn unit_tag(kind: NoiseKind) -> BasisTag {
    match kind {
        NoiseKind::Gaussian => BasisTag::GaussianHermite,
        NoiseKind::Poisson => BasisTag::PoissonCharlier,
    }
}

/// Samples of `η_1..η_N` on every node of `grid`.
fn eta_samples(spec: &NoiseSpec, grid: &GridSpec) -> Result<Vec<GridFunction<f64>>> {
    let charts = spec.charts(grid);
    let mut basis = spec.basis();
    basis.cache_grid(grid, |ax, x| charts[ax].apply(x));
    (1..=spec.basis_count)
        .map(|k| {
            let mut data = Vec::with_capacity(grid.len());
            for flat in 0..grid.len() {
                data.push(basis.cached(k, &grid.unflatten(flat)[..grid.dim()])?);
            }
            GridFunction::from_data(*grid, data)
        })
        .collect()
}

/// `W = Σ_{k ≤ N} η_k H_{ε_k}`, tagged Poisson–Charlier for Poisson noise.
pub fn white_noise_field(spec: &NoiseSpec, grid: &GridSpec) -> Result<ChaosField<GridFunction<f64>>> {
    spec.check_grid(grid)?;
    let mut field = ChaosField::zero(spec.index_set(), *grid, unit_tag(spec.kind));
    for (k, eta) in eta_samples(spec, grid)?.into_iter().enumerate() {
        field.set(&MultiIndex::unit(k), eta)?;
    }
    Ok(field)
}

/// `B(x) = Σ_k (Π_i ∫_{Ξ(x_i)} ζ_{α_i+1}) H_{ε_k}` with `Ξ(x)` the signed
/// interval from 0 to `x`.
pub fn brownian_sheet_field(spec: &NoiseSpec, grid: &GridSpec) -> Result<ChaosField<GridFunction<f64>>> {
    if spec.kind != NoiseKind::Gaussian {
        return Err(Error::InvalidParameter("Brownian sheet is built for Gaussian noise only".into()));
    }
    spec.check_grid(grid)?;
    let basis = spec.basis();
    let charts = spec.charts(grid);
    let m = basis.max_order();
    // tables[axis][node][order]
    let tables: Vec<Vec<Vec<f64>>> = grid
        .axes()
        .iter()
        .zip(&charts)
        .map(|(a, c)| {
            let base = hermite_fn_integral_table(m, c.apply(0.0));
            (0..a.nodes)
                .map(|i| {
                    hermite_fn_integral_table(m, c.apply(a.coordinate(i)))
                        .iter()
                        .zip(&base)
                        .map(|(v, b)| (v - b) / c.scale)
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut field = ChaosField::zero(spec.index_set(), *grid, BasisTag::GaussianHermite);
    for k in 1..=spec.basis_count {
        let alpha = basis.alpha(k)?;
        let data = (0..grid.len())
            .map(|flat| {
                let idx = grid.unflatten(flat);
                (0..grid.dim()).map(|ax| tables[ax][idx[ax]][alpha.get(ax) as usize]).product()
            })
            .collect();
        field.set(&MultiIndex::unit(k - 1), GridFunction::from_data(*grid, data)?)?;
    }
    Ok(field)
}

/// Multiplies every coefficient by `(1 + |k|²)^{−γ}` over all axes of the
/// coefficient grid.
pub fn smooth<S: crate::Scalar>(
    field: &ChaosField<GridFunction<S>>,
    gamma: f64,
) -> Result<ChaosField<GridFunction<S>>> {
    let axes: Vec<usize> = (0..field.space().dim()).collect();
    smooth_axes(field, gamma, &axes)
}

/// [`smooth`] restricted to the listed axes.
pub fn smooth_axes<S: crate::Scalar>(
    field: &ChaosField<GridFunction<S>>,
    gamma: f64,
    axes: &[usize],
) -> Result<ChaosField<GridFunction<S>>> {
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("smoothing exponent {gamma} must be >= 0")));
    }
    if gamma == 0.0 {
        return Ok(field.clone());
    }
    let kernel = SpectralKernel::new(*field.space())?;
    let symbol: Vec<Complex64> = (0..field.space().len())
        .map(|f| {
            let k = kernel.wavevector(f);
            let k2: f64 = axes.iter().map(|&a| k[a] * k[a]).sum();
            Complex64::new(libm::pow(1.0 + k2, -gamma), 0.0)
        })
        .collect();
    Ok(field.map(*field.space(), |c| kernel.apply_diagonal(c, &symbol)))
}

/// One reproducible noise realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    /// Gaussian: the i.i.d. `ξ_k`. Poisson: per-cell counts.
    pub draws: Vec<f64>,
    /// Realised (smoothed, for `γ > 0`) noise on the grid.
    pub field: GridFunction<f64>,
}

/// Path number 0 of the seeded stream.
pub fn sample_path(spec: &NoiseSpec, grid: &GridSpec) -> Result<NoisePath> {
    sample_path_indexed(spec, grid, 0)
}

/// Path number `index`: drawn from the ChaCha substream `index` of `seed`,
/// so batches are reproducible irrespective of how they are scheduled.
pub fn sample_path_indexed(spec: &NoiseSpec, grid: &GridSpec, index: u64) -> Result<NoisePath> {
    spec.check_grid(grid)?;
    let mut rng = substream(spec.seed, index);
    match spec.kind {
        NoiseKind::Gaussian => {
            let draws: Vec<f64> = (0..spec.basis_count).map(|_| StandardNormal.sample(&mut rng)).collect();
            let w = smooth(&white_noise_field(spec, grid)?, spec.gamma)?;
            let field = w.sample_eval(&draws)?;
            Ok(NoisePath { draws, field })
        }
        NoiseKind::Poisson => {
            let vol = grid.cell_volume();
            let dist = Poisson::new(vol).map_err(|e| Error::InvalidParameter(alloc::format!("{e}")))?;
            let draws: Vec<f64> = (0..grid.len()).map(|_| dist.sample(&mut rng)).collect();
            let raw = GridFunction::from_data(*grid, draws.iter().map(|&c| (c - vol) / vol).collect())?;
            let field = if spec.gamma > 0.0 {
                let one = ChaosField::deterministic(Arc::new(IndexSet::enumerate(0, 1)), raw, BasisTag::GaussianHermite);
                smooth(&one, spec.gamma)?.coeff_or_zero(&MultiIndex::zero())
            } else {
                raw
            };
            Ok(NoisePath { draws, field })
        }
    }
}

/// `ChaCha8` generator for substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws a `u64` (used to derive child seeds).
pub fn next_seed(rng: &mut ChaCha8Rng) -> u64 {
    rng.next_u64()
}

/// Spatial slices `(α, Γ_α(·, t))` of every stored noise coefficient.
pub fn slices_at<C>(noise: &ChaosField<GridFunction<C>>, t: f64) -> Vec<(MultiIndex, GridFunction<C>)>
where
    C: crate::Scalar,
    GridFunction<C>: Coefficient,
{
    noise.iter().map(|(_, a, c)| (a.clone(), c.time_slice(t))).collect()
}

/// `Σ_k z_k Γ_{ε_k}(·, t)` plus any deterministic part: the per-`z` potential.
pub fn potential_at(noise: &ChaosField<GridFunction<f64>>, z: &[Complex64], t: f64) -> GridFunction<Complex64> {
    let spatial = noise.space().spatial();
    let mut acc = GridFunction::<Complex64>::zeros(spatial);
    for (_, alpha, c) in noise.iter() {
        let w = alpha.monomial(z, Complex64::new(1.0, 0.0));
        let s = c.time_slice(t);
        for (o, &v) in acc.data_mut().iter_mut().zip(s.data()) {
            *o += w * v;
        }
    }
    acc
}

/// `true` when every coefficient is constant along its spatial axes.
pub fn is_space_independent(noise: &ChaosField<GridFunction<f64>>) -> bool {
    let grid = noise.space();
    let m = grid.spatial().len();
    noise.iter().all(|(_, _, c)| {
        c.data().chunks(m).all(|slab| slab.iter().all(|&v| (v - slab[0]).abs() <= 1e-14 * (1.0 + slab[0].abs())))
    })
}

/// Is axis `i` of `grid` a time axis?
pub fn is_time_axis(grid: &GridSpec, i: usize) -> bool {
    grid.axis(i).role == AxisRole::Time
}
