//! The experiment pipeline: noise → data → solve → statistics → oracles → export.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use wickspde_core::chaos::{BasisTag, ChaosField};
use wickspde_core::grid::{GridFunction, GridSpec};
use wickspde_core::multiindex::{IndexSet, MultiIndex};
use wickspde_core::noise::{self, NoiseKind, NoiseSpec};
use wickspde_core::oracle::{
    default_z_panel, feynman_kac_mc, solve_deterministic_at_z, strichartz_diagnostic, strichartz_ratio, FkOptions,
    OracleReport, ZParams,
};
use wickspde_core::solvers::{
    self, kpz::PathTrajectory, ComplexField, Equation, History, RealField, RunOptions,
};
use wickspde_core::spectral::SpectralKernel;

use crate::chaos_io::{self, Persist};
use crate::config::{ExperimentConfig, NoiseChoice, OracleKind, Profile};
use crate::stats;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Validation = 1,
    GuardAbort = 2,
    OracleFailure = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] crate::config::ConfigError),
    #[error("{0}")]
    Setup(String),
    #[error(transparent)]
    Core(#[from] wickspde_core::Error),
    #[error(transparent)]
    Format(#[from] chaos_io::FormatError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Configuration and set-up problems are validation failures.
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            Self::Core(wickspde_core::Error::BlowUp { .. }) => ExitStatus::GuardAbort,
            _ => ExitStatus::Validation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub reports: Vec<OracleReport>,
    /// Output files relative to the output directory, manifest last.
    pub files: Vec<PathBuf>,
    pub aborted: Option<String>,
}

/// Initial data of either scalar type.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Real(RealField),
    Complex(ComplexField),
}

impl Initial {
    pub fn complexified(&self) -> ComplexField {
        match self {
            Self::Real(f) => f.map(*f.space(), |c| c.to_complex()),
            Self::Complex(f) => f.clone(),
        }
    }
}

/// Everything the solvers and oracles share.
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: GridSpec,
    pub set: Arc<IndexSet>,
    pub basis: BasisTag,
    /// Noise on its own grid (spatial, or space-time), projected to `set`.
    pub noise: RealField,
    pub initial: Initial,
}

pub fn spatial_grid(cfg: &ExperimentConfig) -> Result<GridSpec, RunError> {
    Ok(match cfg.grid.ny {
        None => GridSpec::line(cfg.grid.nx, cfg.grid.lx)?,
        Some(ny) => GridSpec::plane(cfg.grid.nx, cfg.grid.lx, ny, cfg.grid.ly)?,
    })
}

fn noise_spec(cfg: &ExperimentConfig, time_extended: bool) -> NoiseSpec {
    let kind = if cfg.noise.kind == NoiseChoice::Poisson { NoiseKind::Poisson } else { NoiseKind::Gaussian };
    NoiseSpec::new(kind, cfg.space_dim(), cfg.noise.basis_count)
        .time_extended(time_extended)
        .with_gamma(cfg.noise.gamma)
        .with_seed(cfg.noise_seed())
        .with_chart(cfg.noise.chart)
}

/// Smoothed, scaled white noise over `grid`, smoothing along spatial axes only.
fn noise_field(cfg: &ExperimentConfig, grid: &GridSpec, time_extended: bool) -> Result<RealField, RunError> {
    let spec = noise_spec(cfg, time_extended);
    let w = noise::white_noise_field(&spec, grid)?;
    let axes: Vec<usize> = (0..grid.space_dim()).collect();
    Ok(noise::smooth_axes(&w, cfg.noise.gamma, &axes)?.scaled(cfg.noise.amplitude))
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<Problem, RunError> {
    cfg.validate()?;
    let grid = spatial_grid(cfg)?;
    let set = Arc::new(IndexSet::enumerate(cfg.chaos_k, cfg.chaos_n));
    let basis = if cfg.noise.kind == NoiseChoice::Poisson { BasisTag::PoissonCharlier } else { BasisTag::GaussianHermite };
    let noise = match cfg.noise.kind {
        NoiseChoice::None => ChaosField::zero(set.clone(), grid, basis),
        _ => {
            let ngrid = if cfg.noise.time_extended { grid.with_time(cfg.grid.nt, cfg.t_end)? } else { grid };
            noise_field(cfg, &ngrid, cfg.noise.time_extended)?.project(set.clone())
        }
    };
    let initial = initial_data(cfg, &grid, &set, basis)?;
    Ok(Problem { grid, set, basis, noise, initial })
}

fn profile_value(cfg: &ExperimentConfig, x: &[f64]) -> Complex64 {
    let p = &cfg.init;
    let r2: f64 = x.iter().enumerate().map(|(i, &v)| if i == 0 { (v - p.center).powi(2) } else { v * v }).sum();
    let gauss = p.amplitude * (-r2 / (2.0 * p.width * p.width)).exp();
    match p.profile {
        Profile::Gaussian => Complex64::new(gauss, 0.0),
        Profile::Packet => Complex64::from_polar(gauss, p.wavenumber * x[0]),
        Profile::Soliton => {
            let s = p.speed;
            let sech = 1.0 / (0.5 * s.sqrt() * (x[0] - p.center)).cosh();
            Complex64::new(3.0 * s * sech * sech, 0.0)
        }
        Profile::Constant => Complex64::new(p.amplitude, 0.0),
        Profile::Sine => Complex64::new(p.amplitude * (p.wavenumber * x[0]).sin(), 0.0),
        Profile::Zero | Profile::File => Complex64::new(0.0, 0.0),
    }
}

fn initial_data(cfg: &ExperimentConfig, grid: &GridSpec, set: &Arc<IndexSet>, basis: BasisTag) -> Result<Initial, RunError> {
    let complex = cfg.equation.is_complex();
    if cfg.init.profile == Profile::File {
        let path = cfg.init.file.as_ref().expect("validated");
        let bytes = fs::read(path)?;
        let kind = chaos_io::peek_kind(&bytes)?;
        let real: Option<RealField> = match kind {
            wickspde_core::chaos::CoefficientKind::RealGrid => Some(chaos_io::from_bytes(&bytes)?),
            _ => None,
        };
        let field = match (real, complex) {
            (Some(r), false) => Initial::Real(r),
            (Some(r), true) => Initial::Complex(r.map(*r.space(), |c| c.to_complex())),
            (None, true) => Initial::Complex(chaos_io::from_bytes(&bytes)?),
            (None, false) => return Err(RunError::Setup(format!("{} needs real-grid initial data", cfg.equation.tag()))),
        };
        return match field {
            Initial::Real(f) => check_loaded(f, grid, set, basis).map(Initial::Real),
            Initial::Complex(f) => check_loaded(f, grid, set, basis).map(Initial::Complex),
        };
    }
    let profile = GridFunction::from_fn(*grid, |x| profile_value(cfg, x));
    let mut real = ChaosField::deterministic(set.clone(), profile.map(|c| c.re), basis);
    if cfg.init.noise != 0.0 {
        let w = noise_field(cfg, grid, false)?.scaled(cfg.init.noise / cfg.noise.amplitude.max(f64::MIN_POSITIVE));
        real = real.add_scaled(&w.project(set.clone()), 1.0)?;
    }
    if cfg.equation == Equation::Kpz {
        return Ok(Initial::Real(real));
    }
    Ok(match complex {
        false => Initial::Real(real),
        true => {
            let mut c = real.map(*grid, |g| g.to_complex());
            c.set(&MultiIndex::zero(), profile)?;
            Initial::Complex(c)
        }
    })
}

fn check_loaded<C>(f: ChaosField<GridFunction<C>>, grid: &GridSpec, set: &Arc<IndexSet>, basis: BasisTag) -> Result<ChaosField<GridFunction<C>>, RunError>
where
    C: wickspde_core::Scalar,
{
    if f.space() != grid {
        return Err(RunError::Setup("initial-data file grid differs from the configured grid".into()));
    }
    if f.basis() != basis {
        return Err(RunError::Setup("initial-data file basis differs from the noise basis".into()));
    }
    Ok(f.project(set.clone()))
}

pub fn run_options(cfg: &ExperimentConfig) -> RunOptions {
    RunOptions::new(cfg.t_end, cfg.dt).with_snapshots(cfg.snapshots).with_blowup(cfg.blowup)
}

/// A solved experiment.
#[derive(Debug, Clone)]
pub enum Solution {
    Real(History<f64>),
    Complex(History<Complex64>),
    Kpz { path: PathTrajectory, draws: Vec<f64>, realized: GridFunction<f64> },
}

pub fn solve(cfg: &ExperimentConfig, p: &Problem) -> Result<Solution, RunError> {
    let opts = run_options(cfg);
    let real = || match &p.initial {
        Initial::Real(f) => f.clone(),
        Initial::Complex(_) => unreachable!("real equations get real data"),
    };
    let complex = || p.initial.complexified();
    Ok(match cfg.equation {
        Equation::Transport => Solution::Real(solvers::solve_transport_wick(&p.noise, &real(), &opts)?),
        Equation::Heat => Solution::Real(solvers::solve_heat_wick(&p.noise, &real(), cfg.sigma, &opts)?),
        Equation::NonlinearHeat => Solution::Real(solvers::solve_nonlinear_heat_wick(&real(), cfg.power, &opts)?),
        Equation::Kdv => Solution::Real(solvers::solve_kdv_wick(&real(), &opts)?),
        Equation::BenjaminOno => Solution::Real(solvers::solve_benjamin_ono_wick(&real(), &opts)?),
        Equation::SchrodingerAdditive => Solution::Complex(solvers::solve_schrodinger_additive(&p.noise, &complex(), &opts)?),
        Equation::SchrodingerMult => Solution::Complex(solvers::solve_schrodinger_mult_wick(&p.noise, &complex(), &opts)?),
        Equation::Nls => Solution::Complex(solvers::solve_nls_wick(&p.noise, &complex(), &opts)?),
        Equation::Kpz => {
            let (draws, realized) = realize(cfg, p)?;
            let h0 = real().coeff_or_zero(&MultiIndex::zero());
            let path = solvers::solve_kpz_pathwise(&h0, &realized, cfg.sigma, &opts)?;
            Solution::Kpz { path, draws, realized }
        }
    })
}

/// One Gaussian realisation `Σ ξ_k Γ_{ε_k}` of the configured noise.
fn realize(cfg: &ExperimentConfig, p: &Problem) -> Result<(Vec<f64>, GridFunction<f64>), RunError> {
    if p.basis != BasisTag::GaussianHermite {
        return Err(RunError::Setup("kpz paths are drawn from Gaussian noise".into()));
    }
    let ngrid = match p.noise.space().time_axis() {
        Some(t) => p.grid.with_time(p.noise.space().axis(t).nodes, cfg.t_end)?,
        None => p.grid,
    };
    let mut draws = noise::sample_path(&noise_spec(cfg, ngrid.time_axis().is_some()), &ngrid)?.draws;
    draws.resize(draws.len().max(p.set.max_dims()), 0.0);
    let linear = p.noise.project(Arc::new(IndexSet::enumerate(1, p.set.max_dims())));
    Ok((draws.clone(), linear.sample_eval(&draws)?))
}

/// Complex `z` panel truncated or zero-padded to `n` chaos dimensions.
pub fn panel(n: usize) -> Vec<Vec<Complex64>> {
    default_z_panel()
        .into_iter()
        .map(|mut z| {
            z.resize(n, Complex64::new(0.0, 0.0));
            z
        })
        .collect()
}

fn z_label(z: &[Complex64]) -> String {
    let parts: Vec<String> = z
        .iter()
        .map(|c| if c.im == 0.0 { format!("{}", c.re) } else { format!("{}{:+}i", c.re, c.im) })
        .collect();
    parts.join(";")
}

/// Runs the configured oracle panel against a final solution field.
pub fn run_oracles(cfg: &ExperimentConfig, p: &Problem, final_field: &ComplexField) -> Result<Vec<OracleReport>, RunError> {
    let opts = run_options(cfg);
    let tol = cfg.oracle.tolerance;
    let params = ZParams { sigma: cfg.sigma, power: cfg.power };
    let initial = p.initial.complexified();
    let mut out = Vec::new();
    for kind in &cfg.oracle.panel {
        match kind {
            OracleKind::PerZ => {
                for z in panel(p.set.max_dims()) {
                    let oracle = solve_deterministic_at_z(cfg.equation, &z, &p.noise, &initial, params, &opts)?;
                    let solver = final_field.hermite_transform_eval(&z);
                    out.push(OracleReport::fields(format!("per-z[{}]", z_label(&z)), &solver, oracle.final_state(), tol));
                }
            }
            OracleKind::ClosedForm => out.extend(closed_form(cfg, p, final_field)?),
            OracleKind::Conservation => out.extend(conservation(cfg, p, &initial, final_field)),
            OracleKind::FeynmanKac => out.extend(fk_reports(cfg, p, final_field)),
            OracleKind::Strichartz => out.push(strichartz_sweep(cfg)?),
        }
    }
    Ok(out)
}

fn degree0(f: &ComplexField) -> GridFunction<Complex64> {
    f.coeff_or_zero(&MultiIndex::zero())
}

fn closed_form(cfg: &ExperimentConfig, p: &Problem, final_field: &ComplexField) -> Result<Vec<OracleReport>, RunError> {
    let t = cfg.t_end;
    let tol = cfg.oracle.tolerance;
    let init = &cfg.init;
    let zero_index_noise = p.noise.coeff(&MultiIndex::zero()).is_some();
    let got = degree0(final_field);
    let exact: Option<GridFunction<Complex64>> = match (cfg.equation, init.profile) {
        // The degree-0 coefficient of every linear equation solves the noise-free problem
        // unless the noise itself has a deterministic part.
        (_, _) if zero_index_noise => None,
        (Equation::Heat, Profile::Gaussian) => {
            let s2 = init.width * init.width + cfg.sigma * cfg.sigma * t;
            let d = p.grid.dim() as i32;
            Some(GridFunction::from_fn(p.grid, |x| {
                let r2: f64 = x.iter().enumerate().map(|(i, &v)| if i == 0 { (v - init.center).powi(2) } else { v * v }).sum();
                Complex64::new(init.amplitude * (init.width * init.width / s2).powf(0.5 * d as f64) * (-r2 / (2.0 * s2)).exp(), 0.0)
            }))
        }
        (Equation::SchrodingerAdditive | Equation::SchrodingerMult, Profile::Gaussian | Profile::Packet) => {
            let k = if init.profile == Profile::Packet { init.wavenumber } else { 0.0 };
            let w2 = Complex64::new(init.width * init.width, 2.0 * t);
            Some(GridFunction::from_fn(p.grid, |x| {
                let mut v = Complex64::new(init.amplitude, 0.0);
                for (i, &xi) in x.iter().enumerate() {
                    let (c, kk) = if i == 0 { (init.center, k) } else { (0.0, 0.0) };
                    let y = xi - c - 2.0 * kk * t;
                    v *= (init.width * init.width / w2).sqrt() * (-(y * y) / (2.0 * w2)).exp();
                }
                v * Complex64::from_polar(1.0, k * x[0] - k * k * t)
            }))
        }
        (Equation::Transport, _) => Some(degree0(&p.initial.complexified())),
        (Equation::NonlinearHeat, Profile::Constant) => {
            let c = init.amplitude;
            let v = if cfg.power == 2 { c / (1.0 + c * t) } else { c / (1.0 + 2.0 * c * c * t).sqrt() };
            Some(GridFunction::constant(p.grid, Complex64::new(v, 0.0)))
        }
        (Equation::Kdv, Profile::Soliton) => {
            let s = init.speed;
            let l = p.grid.axis(0).length;
            Some(GridFunction::from_fn(p.grid, |x| {
                let mut y = x[0] - init.center - s * t;
                y -= l * (y / l).round();
                let sech = 1.0 / (0.5 * s.sqrt() * y).cosh();
                Complex64::new(3.0 * s * sech * sech, 0.0)
            }))
        }
        _ => None,
    };
    let mut out = Vec::new();
    if let Some(e) = exact {
        out.push(OracleReport::fields(format!("closed-form[{}]", cfg.equation.tag()), &got, &e, tol));
    }
    Ok(out)
}

/// Hopf–Cole check for a KPZ path: `exp(h)` against an independent solve of
/// the pathwise heat equation with the same realised potential.
fn hopf_cole(cfg: &ExperimentConfig, p: &Problem, draws: &[f64], path: &PathTrajectory) -> Result<OracleReport, RunError> {
    let z: Vec<Complex64> = draws.iter().map(|&d| Complex64::new(d, 0.0)).collect();
    let linear = p.noise.project(Arc::new(IndexSet::enumerate(1, p.set.max_dims())));
    let h0 = path.states[0].clone();
    let phi0 = ChaosField::deterministic(p.set.clone(), h0.map(|v| Complex64::new(v.exp(), 0.0)), BasisTag::GaussianHermite);
    let params = ZParams { sigma: cfg.sigma, power: cfg.power };
    let oracle = solve_deterministic_at_z(Equation::Heat, &z, &linear, &phi0, params, &run_options(cfg))?;
    let h = path.states.last().expect("initial state");
    let views = solvers::kpz_views(h, cfg.sigma)?;
    Ok(OracleReport::fields("closed-form[hopf-cole]", &views.hopf_cole.to_complex(), oracle.final_state(), cfg.oracle.tolerance))
}

fn conservation(cfg: &ExperimentConfig, p: &Problem, initial: &ComplexField, final_field: &ComplexField) -> Vec<OracleReport> {
    let z = &panel(p.set.max_dims())[1];
    let (a, b) = (initial.hermite_transform_eval(z), final_field.hermite_transform_eval(z));
    let mass = |u: &GridFunction<Complex64>| u.integral().re;
    let energy = |u: &GridFunction<Complex64>| u.norm_sq();
    let label = z_label(z);
    let mut out = Vec::new();
    let mut push = |name: &str, x: f64, y: f64, tol: f64| {
        // Drift relative to the initial value.
        let mut r = OracleReport::scalar(format!("{name}[{label}]"), y, x, tol);
        r.pass = r.rel_discrepancy <= tol;
        out.push(r);
    };
    match cfg.equation {
        Equation::SchrodingerMult => push("l2-drift", energy(&a), energy(&b), 1e-6),
        // Chaos truncation breaks exact conservation for the cubic equation.
        Equation::Nls => push("l2-drift", energy(&a), energy(&b), cfg.oracle.tolerance),
        Equation::Kdv => {
            push("mass-drift", mass(&a), mass(&b), 1e-6);
            push("l2-drift", energy(&a), energy(&b), 1e-6);
        }
        Equation::BenjaminOno => push("mass-drift", mass(&a), mass(&b), 1e-8),
        _ => {}
    }
    out
}

fn fk_reports(cfg: &ExperimentConfig, p: &Problem, final_field: &ComplexField) -> Vec<OracleReport> {
    let z = &panel(p.set.max_dims())[1];
    let solver = final_field.hermite_transform_eval(z);
    let initial = match &p.initial {
        Initial::Real(f) => f,
        Initial::Complex(_) => unreachable!("heat data is real"),
    };
    let axis = p.grid.axis(0);
    let centre = (((cfg.init.center - axis.origin) / axis.spacing()).round() as isize).rem_euclid(axis.nodes as isize) as usize;
    let step = ((cfg.init.width / axis.spacing()).round() as usize).max(1);
    let opts = FkOptions { paths: cfg.oracle.paths, seed: cfg.seed, dt: cfg.dt / 4.0 };
    let mut out = Vec::new();
    for (j, off) in [-2isize, -1, 0, 1, 2].into_iter().enumerate() {
        let i = (centre as isize + off * step as isize / 2).rem_euclid(axis.nodes as isize) as usize;
        let mut x = vec![axis.coordinate(i)];
        let mut flat = i;
        if p.grid.dim() == 2 {
            let ay = p.grid.axis(1);
            let jy = ay.nodes / 2;
            x.push(ay.coordinate(jy));
            flat += jy * p.grid.stride(1);
        }
        let est = feynman_kac_mc(z, &p.noise, initial, cfg.sigma, &x, cfg.t_end, &FkOptions { seed: opts.seed.wrapping_add(j as u64), ..opts });
        out.push(OracleReport::stochastic(format!("fk[x={}]", x[0]), solver.data()[flat], &est));
    }
    out
}

fn strichartz_sweep(cfg: &ExperimentConfig) -> Result<OracleReport, RunError> {
    if cfg.space_dim() != 1 {
        return Err(RunError::Setup("the strichartz diagnostic is implemented for d = 1".into()));
    }
    let mut ratios = Vec::new();
    for level in [4usize, 2, 1] {
        let g = GridSpec::line((cfg.grid.nx / level).max(16), cfg.grid.lx)?;
        let u0 = GridFunction::from_fn(g, |x| profile_value(cfg, x));
        let kernel = SpectralKernel::new(g)?;
        let steps = 64 * 4 / level;
        let times: Vec<f64> = (0..=steps).map(|n| cfg.t_end * n as f64 / steps as f64).collect();
        let states: Vec<_> = times.iter().map(|&t| kernel.apply_diagonal(&u0, &kernel.schrodinger_symbol(t))).collect();
        ratios.push(strichartz_ratio(&times, &states, 8.0, 4.0)?);
    }
    Ok(strichartz_diagnostic(&ratios, 0.05))
}

/// Solves, exports and checks one configuration into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, RunError> {
    let started = Instant::now();
    let problem = build_problem(cfg)?;
    fs::create_dir_all(out)?;
    let mut files: Vec<PathBuf> = Vec::new();
    let write = |name: &str, bytes: &[u8], files: &mut Vec<PathBuf>| -> Result<(), RunError> {
        let path = out.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes)?;
        files.push(PathBuf::from(name));
        Ok(())
    };
    write("config.txt", cfg.echo().as_bytes(), &mut files)?;

    let mut manifest = String::new();
    let mut reports = Vec::new();
    let mut aborted = None;
    match solve(cfg, &problem) {
        Err(RunError::Core(e @ wickspde_core::Error::BlowUp { .. })) => aborted = Some(e.to_string()),
        Err(e) => return Err(e),
        Ok(Solution::Real(h)) => {
            export_history(&h, &mut |n, b| write(n, b, &mut files), &mut manifest)?;
            aborted = h.aborted.as_ref().map(|e| e.to_string());
            if aborted.is_none() {
                let f = h.final_field().map(*h.final_field().space(), |c| c.to_complex());
                reports = run_oracles(cfg, &problem, &f)?;
            }
        }
        Ok(Solution::Complex(h)) => {
            export_history(&h, &mut |n, b| write(n, b, &mut files), &mut manifest)?;
            aborted = h.aborted.as_ref().map(|e| e.to_string());
            if aborted.is_none() {
                reports = run_oracles(cfg, &problem, h.final_field())?;
            }
        }
        Ok(Solution::Kpz { path, draws, realized }) => {
            write("kpz.csv", stats::kpz_csv(&path, cfg.sigma)?.as_bytes(), &mut files)?;
            write("noise_path.csv", stats::grid_csv(&realized, "noise").as_bytes(), &mut files)?;
            let _ = writeln!(manifest, "draws = {}", draws.iter().map(|d| format!("{d}")).collect::<Vec<_>>().join(","));
            let _ = writeln!(manifest, "steps = {}", path.times.len().saturating_sub(1));
            if cfg.oracle.panel.contains(&OracleKind::ClosedForm) {
                reports.push(hopf_cole(cfg, &problem, &draws, &path)?);
            }
        }
    }
    if !reports.is_empty() {
        let mut csv = String::from(OracleReport::CSV_HEADER);
        csv.push('\n');
        for r in &reports {
            csv.push_str(&r.csv_row());
            csv.push('\n');
        }
        write("oracle.csv", csv.as_bytes(), &mut files)?;
    }
    let (_, noise_var) = problem.noise.mean_variance();
    let status = if aborted.is_some() {
        ExitStatus::GuardAbort
    } else if reports.iter().any(|r| !r.pass) {
        ExitStatus::OracleFailure
    } else {
        ExitStatus::Success
    };
    let mut head = String::from("wickspde-manifest 1\n");
    let _ = writeln!(head, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(head, "equation = {}", cfg.equation.tag());
    let _ = writeln!(head, "status = {}", match &aborted {
        Some(e) => format!("aborted: {e}"),
        None => "complete".to_owned(),
    });
    let _ = writeln!(head, "exit_code = {}", status as i32);
    let _ = writeln!(head, "wall_clock_seconds = {:.3}", started.elapsed().as_secs_f64());
    let _ = writeln!(head, "coefficients = {}", problem.set.len());
    let _ = writeln!(head, "noise.variance_sup = {}", noise_var.sup_norm());
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(head, "oracle.passed = {passed}/{}", reports.len());
    head.push_str(&manifest);
    files.push(PathBuf::from("manifest.txt"));
    for f in &files {
        let _ = writeln!(head, "file = {}", f.display());
    }
    for line in cfg.echo().lines() {
        let _ = writeln!(head, "config.{line}");
    }
    fs::write(out.join("manifest.txt"), head)?;
    Ok(RunOutcome { status, reports, files, aborted })
}

type Sink<'a> = dyn FnMut(&str, &[u8]) -> Result<(), RunError> + 'a;

fn export_history<S>(
    h: &History<S>,
    write: &mut Sink<'_>,
    manifest: &mut String,
) -> Result<(), RunError>
where
    S: wickspde_core::Scalar,
    GridFunction<S>: Persist,
{
    let _ = writeln!(manifest, "steps = {}", h.steps);
    let _ = writeln!(manifest, "dt_used = {}", h.dt);
    let _ = writeln!(manifest, "overflow.final = {:e}", h.overflow());
    for (i, s) in h.snapshots.iter().enumerate() {
        let name = format!("snapshots/snap_{i:04}.chaos");
        write(&name, &chaos_io::to_bytes(&s.field))?;
        let _ = writeln!(manifest, "snapshot.{i} = t={} overflow={:e}", s.time, s.overflow);
    }
    write("stats.csv", stats::stats_csv(h).as_bytes())?;
    Ok(())
}

/// The `oracle` subcommand: checks an exported final field against the panel.
pub fn oracle_on_file(cfg: &ExperimentConfig, solution: &Path) -> Result<Vec<OracleReport>, RunError> {
    let problem = build_problem(cfg)?;
    let bytes = fs::read(solution)?;
    let field: ComplexField = match chaos_io::peek_kind(&bytes)? {
        wickspde_core::chaos::CoefficientKind::RealGrid => {
            let f: RealField = chaos_io::from_bytes(&bytes)?;
            f.map(*f.space(), |c| c.to_complex())
        }
        _ => chaos_io::from_bytes(&bytes)?,
    };
    if *field.space() != problem.grid {
        return Err(RunError::Setup("solution grid differs from the configured grid".into()));
    }
    run_oracles(cfg, &problem, &field.project(problem.set.clone()))
}
