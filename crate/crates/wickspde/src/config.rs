//! Experiment configuration: flat `key = value` text with dotted sections.
//!
//! ```text
//! # heat equation with space-time white noise
//! equation = heat
//! T = 0.5
//! dt = 0.001
//! grid.nx = 256
//! grid.lx = 20
//! noise.kind = gaussian
//! noise.N = 3
//! chaos.K = 3
//! chaos.N = 3
//! ```
//!
//! Unknown keys are rejected. [`ExperimentConfig::echo`] prints every
//! effective value and re-parses to an equal configuration.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use wickspde_core::multiindex::binomial;
use wickspde_core::noise::Chart;
use wickspde_core::solvers::Equation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn at(line: Option<usize>, key: &str, message: impl Into<String>) -> Self {
        Self { line, key: key.to_owned(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}, key `{}`: {}", self.key, self.message),
            None => write!(f, "key `{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseChoice {
    None,
    Gaussian,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `A exp(−(x−c)²/(2w²))`.
    Gaussian,
    /// Gaussian envelope times `e^{i k x}`.
    Packet,
    /// KdV soliton `3s sech²(½√s (x−c))`.
    Soliton,
    /// Constant `A`.
    Constant,
    /// `A sin(k x)`.
    Sine,
    /// Zero deterministic part.
    Zero,
    /// Chaos-field file given by `init.file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    PerZ,
    ClosedForm,
    FeynmanKac,
    Conservation,
    Strichartz,
}

macro_rules! named {
    ($ty:ty { $($v:ident => $s:literal),* $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $(Self::$v => $s),* }
            }
            pub const NAMES: &'static [&'static str] = &[$($s),*];
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s { $($s => Ok(Self::$v),)* _ => Err(format!("`{s}` is not one of {}", Self::NAMES.join(", "))) }
            }
        }
    };
}

named!(NoiseChoice { None => "none", Gaussian => "gaussian", Poisson => "poisson" });
named!(Profile {
    Gaussian => "gaussian",
    Packet => "packet",
    Soliton => "soliton",
    Constant => "constant",
    Sine => "sine",
    Zero => "zero",
    File => "file",
});
named!(OracleKind {
    PerZ => "per-z",
    ClosedForm => "closed-form",
    FeynmanKac => "fk",
    Conservation => "conservation",
    Strichartz => "strichartz",
});

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub nx: usize,
    pub lx: f64,
    pub ny: Option<usize>,
    pub ly: f64,
    /// Time nodes of space-time noise.
    pub nt: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub kind: NoiseChoice,
    pub dim: Option<usize>,
    pub time_extended: bool,
    pub basis_count: usize,
    pub gamma: f64,
    pub amplitude: f64,
    pub chart: Chart,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitConfig {
    pub profile: Profile,
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    pub wavenumber: f64,
    pub speed: f64,
    /// Weight of a smoothed spatial white-noise part added at degree 1.
    pub noise: f64,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub panel: Vec<OracleKind>,
    pub tolerance: f64,
    pub paths: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub equation: Equation,
    pub sigma: f64,
    pub power: u32,
    pub t_end: f64,
    pub dt: f64,
    pub snapshots: usize,
    pub blowup: f64,
    pub seed: u64,
    pub grid: GridConfig,
    pub noise: NoiseConfig,
    pub chaos_k: u32,
    pub chaos_n: usize,
    pub init: InitConfig,
    pub oracle: OracleConfig,
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            equation: Equation::Heat,
            sigma: 1.0,
            power: 2,
            t_end: 0.5,
            dt: 0.001,
            snapshots: 4,
            blowup: 1e8,
            seed: 0,
            grid: GridConfig { nx: 256, lx: 20.0, ny: None, ly: 20.0, nt: 64 },
            noise: NoiseConfig {
                kind: NoiseChoice::Gaussian,
                dim: None,
                time_extended: true,
                basis_count: 3,
                gamma: 0.0,
                amplitude: 1.0,
                chart: Chart::Fitted,
                seed: None,
            },
            chaos_k: 3,
            chaos_n: 3,
            init: InitConfig {
                profile: Profile::Gaussian,
                amplitude: 1.0,
                width: 1.0,
                center: 0.0,
                wavenumber: 1.0,
                speed: 1.0,
                noise: 0.0,
                file: None,
            },
            oracle: OracleConfig { panel: Vec::new(), tolerance: 1e-3, paths: 10_000 },
            output: PathBuf::from("out"),
        }
    }
}

/// Advisory produced by validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Warning(pub String);

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::at(None, "config", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let Some(f) = &cfg.init.file {
            if f.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.init.file = Some(dir.join(f));
                }
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let n = Some(i + 1);
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| ConfigError::at(n, line, "expected `key = value`"))?;
            if !seen.insert(key.to_owned()) {
                return Err(ConfigError::at(n, key, "duplicate key"));
            }
            cfg.set(key, value).map_err(|m| ConfigError::at(n, key, m))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        fn num<T: FromStr>(v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("cannot parse `{v}`"))
        }
        fn flag(v: &str) -> Result<bool, String> {
            match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(format!("`{v}` is not a boolean")),
            }
        }
        match key {
            "equation" => {
                self.equation = Equation::parse(v).ok_or_else(|| {
                    let tags: Vec<_> = Equation::ALL.iter().map(|e| e.tag()).collect();
                    format!("unknown equation `{v}` (expected one of {})", tags.join(", "))
                })?
            }
            "sigma" => self.sigma = num(v)?,
            "power" => self.power = num(v)?,
            "T" => self.t_end = num(v)?,
            "dt" => self.dt = num(v)?,
            "snapshots" => self.snapshots = num(v)?,
            "blowup" => self.blowup = num(v)?,
            "seed" => self.seed = num(v)?,
            "grid.nx" => self.grid.nx = num(v)?,
            "grid.lx" => self.grid.lx = num(v)?,
            "grid.ny" => self.grid.ny = Some(num(v)?),
            "grid.ly" => self.grid.ly = num(v)?,
            "grid.nt" => self.grid.nt = num(v)?,
            "noise.kind" => self.noise.kind = v.parse()?,
            "noise.dim" => self.noise.dim = Some(num(v)?),
            "noise.time_extended" => self.noise.time_extended = flag(v)?,
            "noise.N" => self.noise.basis_count = num(v)?,
            "noise.gamma" => self.noise.gamma = num(v)?,
            "noise.amplitude" => self.noise.amplitude = num(v)?,
            "noise.chart" => {
                self.noise.chart = match v {
                    "fitted" => Chart::Fitted,
                    "identity" => Chart::Identity,
                    _ => return Err(format!("`{v}` is not one of fitted, identity")),
                }
            }
            "noise.seed" => self.noise.seed = Some(num(v)?),
            "chaos.K" => self.chaos_k = num(v)?,
            "chaos.N" => self.chaos_n = num(v)?,
            "init.profile" => self.init.profile = v.parse()?,
            "init.amplitude" => self.init.amplitude = num(v)?,
            "init.width" => self.init.width = num(v)?,
            "init.center" => self.init.center = num(v)?,
            "init.wavenumber" => self.init.wavenumber = num(v)?,
            "init.speed" => self.init.speed = num(v)?,
            "init.noise" => self.init.noise = num(v)?,
            "init.file" => self.init.file = Some(PathBuf::from(v)),
            "oracle.panel" => {
                self.oracle.panel = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty() && *s != "none")
                    .map(str::parse)
                    .collect::<Result<_, _>>()?
            }
            "oracle.tolerance" => self.oracle.tolerance = num(v)?,
            "oracle.paths" => self.oracle.paths = num(v)?,
            "output.dir" => self.output = PathBuf::from(v),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Checks every precondition; returns advisories on success.
    pub fn validate(&self) -> Result<Vec<Warning>, ConfigError> {
        let bad = |key: &str, msg: String| Err(ConfigError::at(None, key, msg));
        let positive = [
            ("T", self.t_end),
            ("dt", self.dt),
            ("sigma", self.sigma),
            ("blowup", self.blowup),
            ("grid.lx", self.grid.lx),
            ("grid.ly", self.grid.ly),
            ("oracle.tolerance", self.oracle.tolerance),
            ("init.width", self.init.width),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return bad(key, format!("must be positive, got {v}"));
            }
        }
        for (key, n) in [("grid.nx", self.grid.nx), ("grid.nt", self.grid.nt), ("grid.ny", self.grid.ny.unwrap_or(2))] {
            if n < 2 || !n.is_power_of_two() {
                return bad(key, format!("must be a power of two >= 2, got {n}"));
            }
        }
        if self.snapshots == 0 {
            return bad("snapshots", "must be at least 1".into());
        }
        if self.chaos_n == 0 {
            return bad("chaos.N", "must be at least 1".into());
        }
        if self.noise.basis_count == 0 {
            return bad("noise.N", "must be at least 1".into());
        }
        if !(self.noise.gamma >= 0.0) {
            return bad("noise.gamma", format!("must be >= 0, got {}", self.noise.gamma));
        }
        if !self.noise.amplitude.is_finite() {
            return bad("noise.amplitude", "must be finite".into());
        }
        let dim = self.space_dim();
        if let Some(d) = self.noise.dim {
            if d != dim {
                return bad("noise.dim", format!("{d} does not match the {dim}-D grid"));
            }
        }
        if self.equation == Equation::NonlinearHeat && !(2..=3).contains(&self.power) {
            return bad("power", format!("must be 2 or 3, got {}", self.power));
        }
        let one_d = matches!(self.equation, Equation::Transport | Equation::Kdv | Equation::BenjaminOno);
        if one_d && dim != 1 {
            return bad("grid.ny", format!("{} is solved on 1-D grids", self.equation.tag()));
        }
        if self.init.profile == Profile::File {
            match &self.init.file {
                None => return bad("init.file", "required by init.profile = file".into()),
                Some(p) if !p.exists() => return bad("init.file", format!("{} does not exist", p.display())),
                _ => {}
            }
        }
        if self.noise.kind == NoiseChoice::None && self.init.noise != 0.0 {
            return bad("init.noise", "needs a noise basis (noise.kind is none)".into());
        }
        if self.oracle.panel.contains(&OracleKind::FeynmanKac) {
            if self.equation != Equation::Heat {
                return bad("oracle.panel", "fk applies to the heat equation only".into());
            }
            if self.oracle.paths < 1000 {
                return bad("oracle.paths", format!("must be at least 1000, got {}", self.oracle.paths));
            }
        }
        if self.oracle.panel.contains(&OracleKind::PerZ) && self.equation == Equation::Kpz {
            return bad("oracle.panel", "per-z has no Wick form for kpz; use closed-form".into());
        }
        let mut warnings = Vec::new();
        let count = binomial(self.chaos_n as u64 + self.chaos_k as u64, self.chaos_k as u64);
        let nodes = self.grid.nx * self.grid.ny.unwrap_or(1);
        let bytes_per = if self.equation.is_complex() { 16.0 } else { 8.0 };
        match count {
            Some(c) if c <= 1_000_000 => {}
            _ => {
                let c = count.map_or(f64::INFINITY, |c| c as f64);
                warnings.push(Warning(format!(
                    "chaos.K = {}, chaos.N = {} give {c:e} coefficients; one state needs about {:.3e} bytes",
                    self.chaos_k,
                    self.chaos_n,
                    c * nodes as f64 * bytes_per
                )));
            }
        }
        if self.noise.kind != NoiseChoice::None && self.noise.basis_count > self.chaos_n {
            warnings.push(Warning(format!(
                "noise.N = {} exceeds chaos.N = {}; the extra noise modes are truncated away",
                self.noise.basis_count, self.chaos_n
            )));
        }
        Ok(warnings)
    }

    pub fn space_dim(&self) -> usize {
        if self.grid.ny.is_some() {
            2
        } else {
            1
        }
    }

    pub fn noise_seed(&self) -> u64 {
        self.noise.seed.unwrap_or(self.seed)
    }

    /// Every effective value, in a form [`ExperimentConfig::parse`] accepts.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("equation", &self.equation.tag());
        kv("sigma", &self.sigma);
        kv("power", &self.power);
        kv("T", &self.t_end);
        kv("dt", &self.dt);
        kv("snapshots", &self.snapshots);
        kv("blowup", &self.blowup);
        kv("seed", &self.seed);
        kv("grid.nx", &self.grid.nx);
        kv("grid.lx", &self.grid.lx);
        if let Some(ny) = self.grid.ny {
            kv("grid.ny", &ny);
        }
        kv("grid.ly", &self.grid.ly);
        kv("grid.nt", &self.grid.nt);
        kv("noise.kind", &self.noise.kind.name());
        if let Some(d) = self.noise.dim {
            kv("noise.dim", &d);
        }
        kv("noise.time_extended", &self.noise.time_extended);
        kv("noise.N", &self.noise.basis_count);
        kv("noise.gamma", &self.noise.gamma);
        kv("noise.amplitude", &self.noise.amplitude);
        kv("noise.chart", &if self.noise.chart == Chart::Fitted { "fitted" } else { "identity" });
        if let Some(seed) = self.noise.seed {
            kv("noise.seed", &seed);
        }
        kv("chaos.K", &self.chaos_k);
        kv("chaos.N", &self.chaos_n);
        kv("init.profile", &self.init.profile.name());
        kv("init.amplitude", &self.init.amplitude);
        kv("init.width", &self.init.width);
        kv("init.center", &self.init.center);
        kv("init.wavenumber", &self.init.wavenumber);
        kv("init.speed", &self.init.speed);
        kv("init.noise", &self.init.noise);
        if let Some(f) = &self.init.file {
            kv("init.file", &f.display());
        }
        let panel: Vec<_> = self.oracle.panel.iter().map(|o| o.name()).collect();
        kv("oracle.panel", &if panel.is_empty() { "none".to_owned() } else { panel.join(",") });
        kv("oracle.tolerance", &self.oracle.tolerance);
        kv("oracle.paths", &self.oracle.paths);
        kv("output.dir", &self.output.display());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let c = ExperimentConfig::parse("equation = kdv # soliton\n\ngrid.nx = 512\ninit.profile = soliton\n").unwrap();
        assert_eq!(c.equation, Equation::Kdv);
        assert_eq!(c.grid.nx, 512);
        assert_eq!(c.init.profile, Profile::Soliton);
    }

    #[test]
    fn errors_name_the_key() {
        let e = ExperimentConfig::parse("dt = -0.1").unwrap().validate().unwrap_err();
        assert_eq!(e.key, "dt");
        let e = ExperimentConfig::parse("T = 1\nequation = maxwell").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(2), "equation"));
        assert!(e.message.contains("maxwell"));
        assert_eq!(ExperimentConfig::parse("grid.nz = 4").unwrap_err().message, "unknown key");
        assert_eq!(ExperimentConfig::parse("dt = 1\ndt = 2").unwrap_err().message, "duplicate key");
        assert_eq!(ExperimentConfig::parse("grid.nx = 100").unwrap().validate().unwrap_err().key, "grid.nx");
    }

    #[test]
    fn echo_round_trips() {
        let mut c = ExperimentConfig::default();
        c.grid.ny = Some(64);
        c.noise.seed = Some(9);
        c.dt = 1.0 / 3.0;
        c.oracle.panel = vec![OracleKind::PerZ, OracleKind::Conservation];
        assert_eq!(ExperimentConfig::parse(&c.echo()).unwrap(), c);
        let d = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&d.echo()).unwrap(), d);
    }

    #[test]
    fn large_truncation_warns() {
        let c = ExperimentConfig::parse("chaos.K = 10\nchaos.N = 20").unwrap();
        let w = c.validate().unwrap();
        assert_eq!(w.len(), 1);
        assert!(w[0].0.contains("bytes"));
        assert!(ExperimentConfig::default().validate().unwrap().is_empty());
    }
}
