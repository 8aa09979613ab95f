//! Coefficient-propagator solvers for the Wick-quantized equations.
//!
//! A quantized equation with a degree-1 noise field becomes a triangular
//! system of deterministic PDEs for the chaos coefficients `u_γ`. Every
//! solver here advances the whole dense coefficient vector of an
//! [`IndexSet`] and records snapshots in a [`History`].

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::chaos::{BasisTag, ChaosField};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::multiindex::{IndexSet, MultiIndex};
use crate::par::map_indexed;
use crate::scalar::Scalar;

pub mod dispersive;
pub mod heat;
pub mod kpz;
pub mod nlheat;
pub mod nls;
pub mod schrodinger;
pub mod transport;

pub use dispersive::{solve_benjamin_ono_wick, solve_kdv_wick};
pub use heat::solve_heat_wick;
pub use kpz::{kpz_views, solve_kpz_pathwise, KpzViews};
pub use nlheat::solve_nonlinear_heat_wick;
pub use nls::solve_nls_wick;
pub use schrodinger::{solve_schrodinger_additive, solve_schrodinger_mult_wick};
pub use transport::{eval_transport_characteristic, solve_transport_wick, LinearTransport, QuasilinearTransport};

pub type RealField = ChaosField<GridFunction<f64>>;
pub type ComplexField = ChaosField<GridFunction<Complex64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    Transport,
    Heat,
    Kpz,
    NonlinearHeat,
    SchrodingerAdditive,
    SchrodingerMult,
    Nls,
    Kdv,
    BenjaminOno,
}

impl Equation {
    pub const ALL: [Equation; 9] = [
        Self::Transport,
        Self::Heat,
        Self::Kpz,
        Self::NonlinearHeat,
        Self::SchrodingerAdditive,
        Self::SchrodingerMult,
        Self::Nls,
        Self::Kdv,
        Self::BenjaminOno,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Transport => "transport",
            Self::Heat => "heat",
            Self::Kpz => "kpz",
            Self::NonlinearHeat => "nlheat",
            Self::SchrodingerAdditive => "schrodinger-additive",
            Self::SchrodingerMult => "schrodinger-mult",
            Self::Nls => "nls",
            Self::Kdv => "kdv",
            Self::BenjaminOno => "bo",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.tag() == s)
    }

    /// Whether the solved coefficients are complex-valued.
    pub fn is_complex(self) -> bool {
        matches!(self, Self::SchrodingerAdditive | Self::SchrodingerMult | Self::Nls)
    }
}

/// Time-stepping controls shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Number of snapshot intervals; `t = 0` and `t_end` are always kept.
    pub snapshots: usize,
    /// Sup-norm bound for the blow-up guard.
    pub blowup: f64,
}

impl RunOptions {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self { t_end, dt, snapshots: 1, blowup: 1e8 }
    }

    pub fn with_snapshots(mut self, n: usize) -> Self {
        self.snapshots = n.max(1);
        self
    }

    pub fn with_blowup(mut self, bound: f64) -> Self {
        self.blowup = bound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("T = {} must be non-negative", self.t_end)));
        }
        if !(self.blowup > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("blow-up bound {} must be positive", self.blowup)));
        }
        Ok(())
    }

    /// Step count and the step actually used (`t_end / steps`, never larger
    /// than the requested `dt`).
    pub fn steps(&self) -> (usize, f64) {
        if self.t_end == 0.0 {
            return (0, self.dt);
        }
        let n = libm::ceil(self.t_end / self.dt - 1e-9).max(1.0) as usize;
        (n, self.t_end / n as f64)
    }
}

/// Dense per-index state of a propagator system.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorSystem<S: Scalar> {
    pub equation: Equation,
    pub index_set: Arc<IndexSet>,
    pub basis: BasisTag,
    pub grid: GridSpec,
    /// `state[p]` is the coefficient of `index_set.members()[p]`.
    pub state: Vec<GridFunction<S>>,
    pub time: f64,
    pub dt: f64,
    /// Time-integrated truncation-overflow mass.
    pub overflow: f64,
}

impl<S: Scalar> PropagatorSystem<S> {
    pub fn from_field(equation: Equation, field: &ChaosField<GridFunction<S>>, dt: f64) -> Self {
        let grid = *field.space();
        let state = (0..field.index_set().len())
            .map(|p| field.coeff_at(p).cloned().unwrap_or_else(|| GridFunction::zeros(grid)))
            .collect();
        Self {
            equation,
            index_set: field.index_set().clone(),
            basis: field.basis(),
            grid,
            state,
            time: 0.0,
            dt,
            overflow: 0.0,
        }
    }

    /// Snapshot as a chaos field; identically zero coefficients are omitted.
    pub fn to_field(&self) -> ChaosField<GridFunction<S>> {
        let mut f = ChaosField::zero(self.index_set.clone(), self.grid, self.basis);
        for (p, c) in self.state.iter().enumerate() {
            if c.data().iter().any(|v| v.norm_sqr() != 0.0) {
                f.set_at(p, c.clone()).expect("state lives on the system grid");
            }
        }
        f
    }

    pub fn sup_norm(&self) -> f64 {
        self.state.iter().fold(0.0, |m, c| m.max(c.sup_norm()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<S: Scalar> {
    pub time: f64,
    pub field: ChaosField<GridFunction<S>>,
    /// Cumulative truncation-overflow mass up to `time`.
    pub overflow: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct History<S: Scalar> {
    pub equation: Equation,
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<Snapshot<S>>,
    /// Set when the blow-up guard stopped the run early.
    pub aborted: Option<Error>,
}

impl<S: Scalar> History<S> {
    pub fn last(&self) -> &Snapshot<S> {
        self.snapshots.last().expect("a history holds at least the initial snapshot")
    }

    pub fn final_field(&self) -> &ChaosField<GridFunction<S>> {
        &self.last().field
    }

    pub fn overflow(&self) -> f64 {
        self.last().overflow
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }
}

/// Runs `step` until `t_end`, recording snapshots and enforcing the guard.
pub(crate) fn drive<S: Scalar>(
    mut sys: PropagatorSystem<S>,
    opts: &RunOptions,
    mut step: impl FnMut(&mut PropagatorSystem<S>) -> Result<()>,
) -> Result<History<S>> {
    opts.validate()?;
    let (steps, dt) = opts.steps();
    sys.dt = dt;
    let every = (steps / opts.snapshots).max(1);
    let mut snapshots = alloc::vec![Snapshot { time: 0.0, field: sys.to_field(), overflow: 0.0 }];
    let mut aborted = None;
    for n in 1..=steps {
        step(&mut sys)?;
        sys.time = n as f64 * dt;
        let sup = sys.sup_norm();
        if !(sup <= opts.blowup) {
            aborted = Some(Error::BlowUp { time: sys.time, sup, bound: opts.blowup });
            snapshots.push(Snapshot { time: sys.time, field: sys.to_field(), overflow: sys.overflow });
            break;
        }
        if n % every == 0 || n == steps {
            snapshots.push(Snapshot { time: sys.time, field: sys.to_field(), overflow: sys.overflow });
        }
    }
    Ok(History { equation: sys.equation, dt, steps, snapshots, aborted })
}

/// Spatial slices at time `t` of every stored noise coefficient, as
/// `(α, Γ_α(·, t))`.
pub(crate) fn noise_slices(noise: &RealField, t: f64) -> Vec<(MultiIndex, GridFunction<f64>)> {
    noise.iter().map(|(_, a, c)| (a.clone(), c.time_slice(t))).collect()
}

pub(crate) fn check_noise(noise: &RealField, set: &IndexSet, grid: &GridSpec, basis: BasisTag) -> Result<()> {
    if noise.space().spatial() != *grid {
        return Err(Error::SpaceMismatch);
    }
    if noise.basis() != basis {
        return Err(Error::BasisMismatch);
    }
    if noise.index_set().max_dims() > set.max_dims() && noise.degree() > 0 {
        let used = noise.iter().map(|(_, a, _)| a.len()).max().unwrap_or(0);
        if used > set.max_dims() {
            return Err(Error::IndexSetMismatch(alloc::format!(
                "noise uses {used} chaos dimensions but the solution set has {}",
                set.max_dims()
            )));
        }
    }
    Ok(())
}

/// `(Γ ⋄ u)_γ = Σ_{α+β=γ} Γ_α u_β` for every `γ` of `set`, plus the dropped
/// mass `Σ_{α+β∉set} ‖Γ_α u_β‖`.
pub(crate) fn noise_convolution<S: Scalar>(
    slices: &[(MultiIndex, GridFunction<f64>)],
    state: &[GridFunction<S>],
    set: &IndexSet,
    want_overflow: bool,
) -> (Vec<GridFunction<S>>, f64) {
    let grid = *state[0].grid();
    let out = map_indexed(set.len(), |p| {
        let gamma = &set.members()[p];
        let mut acc = GridFunction::<S>::zeros(grid);
        for (alpha, g) in slices {
            if alpha.degree() > gamma.degree() {
                continue;
            }
            let Some(beta) = gamma.sub_checked(alpha) else { continue };
            let Some(q) = set.position(&beta) else { continue };
            for ((o, &gv), &uv) in acc.data_mut().iter_mut().zip(g.data()).zip(state[q].data()) {
                *o += uv.scale(gv);
            }
        }
        acc
    });
    let mut dropped = 0.0;
    if want_overflow {
        for (alpha, g) in slices {
            for (q, beta) in set.members().iter().enumerate() {
                if set.contains(&alpha.add(beta)) {
                    continue;
                }
                let s: f64 = g.data().iter().zip(state[q].data()).map(|(&a, &b)| b.scale(a).norm_sqr()).sum();
                dropped += libm::sqrt(s * grid.cell_volume());
            }
        }
    }
    (out, dropped)
}

/// `(F ⋄ G)_γ` on dense coefficient vectors over `set`.
pub(crate) fn dense_wick<S: Scalar>(f: &[GridFunction<S>], g: &[GridFunction<S>], set: &IndexSet) -> Vec<GridFunction<S>> {
    let grid = *f[0].grid();
    let nz_f: Vec<usize> = (0..f.len()).filter(|&p| f[p].data().iter().any(|v| v.norm_sqr() != 0.0)).collect();
    let nz_g: Vec<bool> = g.iter().map(|c| c.data().iter().any(|v| v.norm_sqr() != 0.0)).collect();
    map_indexed(set.len(), |p| {
        let gamma = &set.members()[p];
        let mut acc = GridFunction::<S>::zeros(grid);
        for &a in &nz_f {
            let alpha = &set.members()[a];
            if alpha.degree() > gamma.degree() {
                continue;
            }
            let Some(beta) = gamma.sub_checked(alpha) else { continue };
            let Some(q) = set.position(&beta) else { continue };
            if !nz_g[q] {
                continue;
            }
            for ((o, &x), &y) in acc.data_mut().iter_mut().zip(f[a].data()).zip(g[q].data()) {
                *o += x * y;
            }
        }
        acc
    })
}

/// `Σ_{α+β∉set} ‖f_α g_β‖` over dense vectors.
pub(crate) fn dense_overflow<S: Scalar>(f: &[GridFunction<S>], g: &[GridFunction<S>], set: &IndexSet) -> f64 {
    let mut dropped = 0.0;
    let vol = f[0].grid().cell_volume();
    for (a, alpha) in set.members().iter().enumerate() {
        if f[a].data().iter().all(|v| v.norm_sqr() == 0.0) {
            continue;
        }
        for (b, beta) in set.members().iter().enumerate() {
            if set.contains(&alpha.add(beta)) {
                continue;
            }
            let s: f64 = f[a].data().iter().zip(g[b].data()).map(|(&x, &y)| (x * y).norm_sqr()).sum();
            dropped += libm::sqrt(s * vol);
        }
    }
    dropped
}

pub(crate) fn axpy<S: Scalar>(y: &[GridFunction<S>], a: f64, x: &[GridFunction<S>]) -> Vec<GridFunction<S>> {
    y.iter()
        .zip(x)
        .map(|(yv, xv)| {
            let data = yv.data().iter().zip(xv.data()).map(|(&p, &q)| p + q.scale(a)).collect();
            GridFunction::from_data(*yv.grid(), data).expect("same grid")
        })
        .collect()
}

/// Classical RK4 step for `u' = f(t, u)` on dense coefficient vectors.
pub(crate) fn rk4_step<S: Scalar>(
    u: &[GridFunction<S>],
    t: f64,
    dt: f64,
    mut f: impl FnMut(f64, &[GridFunction<S>]) -> Result<Vec<GridFunction<S>>>,
) -> Result<Vec<GridFunction<S>>> {
    let k1 = f(t, u)?;
    let k2 = f(t + 0.5 * dt, &axpy(u, 0.5 * dt, &k1))?;
    let k3 = f(t + 0.5 * dt, &axpy(u, 0.5 * dt, &k2))?;
    let k4 = f(t + dt, &axpy(u, dt, &k3))?;
    Ok(u.iter()
        .enumerate()
        .map(|(p, uv)| {
            let data = (0..uv.data().len())
                .map(|i| {
                    uv.data()[i]
                        + (k1[p].data()[i] + k2[p].data()[i].scale(2.0) + k3[p].data()[i].scale(2.0) + k4[p].data()[i])
                            .scale(dt / 6.0)
                })
                .collect();
            GridFunction::from_data(*uv.grid(), data).expect("same grid")
        })
        .collect())
}

/// Integrating-factor RK4 for `û' = L û + N(u)` with diagonal `L`:
/// `e = e^{L dt/2}` per bin, `nonlinear` evaluated in physical space.
pub(crate) fn if_rk4_step<S: Scalar>(
    kernel: &crate::spectral::SpectralKernel,
    e_half: &[Complex64],
    u: &[GridFunction<S>],
    t: f64,
    dt: f64,
    mut nonlinear: impl FnMut(f64, &[GridFunction<S>]) -> Result<Vec<GridFunction<S>>>,
) -> Result<Vec<GridFunction<S>>> {
    let e = |v: &[GridFunction<S>]| -> Vec<GridFunction<S>> { v.iter().map(|c| kernel.apply_diagonal(c, e_half)).collect() };
    let k1 = scale_all(&nonlinear(t, u)?, dt);
    let eu = e(u);
    let k2 = scale_all(&nonlinear(t + 0.5 * dt, &e(&axpy(u, 0.5, &k1)))?, dt);
    let k3 = scale_all(&nonlinear(t + 0.5 * dt, &axpy(&eu, 0.5, &k2))?, dt);
    let e2u = e(&eu);
    let ek3 = e(&k3);
    let k4 = scale_all(&nonlinear(t + dt, &axpy(&e2u, 1.0, &ek3))?, dt);
    let e2k1 = e(&e(&k1));
    let ek23 = e(&axpy(&k2, 1.0, &k3));
    let mut out = axpy(&e2u, 1.0 / 6.0, &e2k1);
    out = axpy(&out, 2.0 / 6.0, &ek23);
    Ok(axpy(&out, 1.0 / 6.0, &k4))
}

pub(crate) fn scale_all<S: Scalar>(v: &[GridFunction<S>], s: f64) -> Vec<GridFunction<S>> {
    v.iter().map(|c| c.scaled(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for e in Equation::ALL {
            assert_eq!(Equation::parse(e.tag()), Some(e));
        }
        assert_eq!(Equation::parse("maxwell"), None);
    }

    #[test]
    fn step_counts() {
        assert_eq!(RunOptions::new(1.0, 0.1).steps().0, 10);
        let (n, dt) = RunOptions::new(1.0, 0.3).steps();
        assert_eq!(n, 4);
        assert!((dt - 0.25).abs() < 1e-15);
        assert!(RunOptions::new(1.0, -0.1).validate().is_err());
    }
}
