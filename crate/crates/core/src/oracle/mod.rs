//! Independent verification oracles.
//!
//! Each oracle follows a path disjoint from the coefficient solvers: a
//! Crank–Nicolson solve of the transformed equation at fixed `z`, a
//! Feynman–Kac Monte Carlo estimate, explicit Gauss–Hermite quadrature, and
//! a Strichartz mixed-norm diagnostic.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_complex::Complex64;

use crate::grid::GridFunction;
use crate::scalar::Scalar;

mod fk;
mod moments;
mod per_z;
mod strichartz;

pub use fk::{feynman_kac_mc, FkEstimate, FkOptions};
pub use moments::{gauss_hermite_moment, MOMENT_MAX_DEGREE, MOMENT_MAX_DIMS};
pub use per_z::{solve_deterministic_at_z, transform_at, ZParams, ZTrajectory};
pub use strichartz::{strichartz_diagnostic, strichartz_ratio};

/// Default evaluation panel `{0, ½e₁, ½e₂, ¼(e₁+e₂), ½i e₁}` in two variables.
pub fn default_z_panel() -> Vec<Vec<Complex64>> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    alloc::vec![
        alloc::vec![c(0.0, 0.0), c(0.0, 0.0)],
        alloc::vec![c(0.5, 0.0), c(0.0, 0.0)],
        alloc::vec![c(0.0, 0.0), c(0.5, 0.0)],
        alloc::vec![c(0.25, 0.0), c(0.25, 0.0)],
        alloc::vec![c(0.0, 0.5), c(0.0, 0.0)],
    ]
}

/// One oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub solver_value: f64,
    pub oracle_value: f64,
    pub abs_discrepancy: f64,
    pub rel_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Sample count and standard error of a stochastic oracle.
    pub samples: Option<usize>,
    pub std_error: Option<f64>,
}

impl OracleReport {
    pub const CSV_HEADER: &'static str =
        "quantity,solver,oracle,abs_discrepancy,rel_discrepancy,tolerance,pass,samples,std_error";

    /// Scalar comparison; passes when the relative discrepancy is within `tol`.
    pub fn scalar(quantity: impl Into<String>, solver: f64, oracle: f64, tol: f64) -> Self {
        let abs = (solver - oracle).abs();
        Self::relative(quantity.into(), solver, oracle, abs, oracle.abs(), tol)
    }

    /// Field comparison in the sup norm, relative to `sup |oracle|`.
    pub fn fields<S: Scalar>(quantity: impl Into<String>, solver: &GridFunction<S>, oracle: &GridFunction<S>, tol: f64) -> Self {
        let abs = solver.max_abs_diff(oracle);
        let scale = oracle.sup_norm();
        Self::relative(quantity.into(), solver.sup_norm(), scale, abs, scale, tol)
    }

    /// Monte Carlo comparison; passes within three standard errors.
    pub fn stochastic(quantity: impl Into<String>, solver: Complex64, estimate: &FkEstimate) -> Self {
        let abs = (solver - estimate.value).norm();
        let tol = 3.0 * estimate.std_error;
        Self {
            quantity: quantity.into(),
            solver_value: solver.norm(),
            oracle_value: estimate.value.norm(),
            abs_discrepancy: abs,
            rel_discrepancy: rel(abs, estimate.value.norm()),
            tolerance: tol,
            pass: abs <= tol,
            samples: Some(estimate.paths),
            std_error: Some(estimate.std_error),
        }
    }

    fn relative(quantity: String, solver: f64, oracle: f64, abs: f64, scale: f64, tol: f64) -> Self {
        let r = rel(abs, scale);
        Self {
            quantity,
            solver_value: solver,
            oracle_value: oracle,
            abs_discrepancy: abs,
            rel_discrepancy: r,
            tolerance: tol,
            pass: r <= tol,
            samples: None,
            std_error: None,
        }
    }

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{:e},{:e},{:e},{:e},{:e},{}",
            self.quantity,
            self.solver_value,
            self.oracle_value,
            self.abs_discrepancy,
            self.rel_discrepancy,
            self.tolerance,
            self.pass
        );
        match self.samples {
            Some(n) => {
                let _ = write!(s, ",{n}");
            }
            None => s.push(','),
        }
        match self.std_error {
            Some(e) => {
                let _ = write!(s, ",{e:e}");
            }
            None => s.push(','),
        }
        s
    }
}

fn rel(abs: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        abs / scale
    } else {
        abs
    }
}
