//! Truncated Wiener-chaos toolkit for Wick-quantized stochastic PDEs.
//!
//! The crate is `no_std` with `alloc`. Enabling the `parallel` feature pulls
//! in `std` and `rayon` to spread coefficient updates and Monte Carlo blocks
//! over a worker pool; results are bit-identical with and without it.
//!
//! Layout:
//!
//! * [`multiindex`]: multi-indices and graded truncation sets.
//! * [`hermite`]: Hermite polynomials, Hermite functions, Charlier functionals.
//! * [`chaos`]: chaos fields, Wick algebra, Hermite transform, norms, moments.
//! * [`noise`]: white noise, Brownian sheet, smoothing, path sampling.
//! * [`spectral`]: FFT-based periodic derivatives and semigroups.
//! * [`solvers`]: coefficient-propagator solvers for each quantized equation.
//! * [`oracle`]: independent checks (per-z solves, Feynman-Kac, quadrature).

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "parallel")]
extern crate std;

pub mod chaos;
pub mod error;
pub mod fft;
pub mod grid;
pub mod hermite;
pub mod multiindex;
pub mod noise;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod solvers;
pub mod spectral;

mod par;

pub use chaos::{BasisTag, ChaosField, Coefficient, CoefficientKind};
pub use error::{Error, Result};
pub use grid::{Axis, AxisRole, GridFunction, GridSpec};
pub use multiindex::{IndexSet, MultiIndex};
pub use noise::{Chart, NoiseKind, NoiseSpec};
pub use num_complex::Complex64;
pub use scalar::Scalar;
