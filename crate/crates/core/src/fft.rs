//! Iterative radix-2 complex FFT for power-of-two lengths.
//!
//! Forward uses `e^{-2πi jk/n}` unnormalised; inverse uses `e^{+2πi jk/n}`
//! and divides by `n`, so `inverse(forward(x)) = x`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    /// `e^{-2πi k/n}` for `k < n/2`.
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let th = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(libm::cos(th), libm::sin(th))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Ok(Self { n, twiddles, bitrev })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, buf: &mut [Complex64], dir: Direction) {
        assert_eq!(buf.len(), self.n, "FFT buffer length mismatch");
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let step = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if dir == Direction::Inverse {
                        w.im = -w.im;
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
        if dir == Direction::Inverse {
            let s = 1.0 / n as f64;
            for v in buf.iter_mut() {
                *v = Complex64::new(v.re * s, v.im * s);
            }
        }
    }
}

/// FFT plans for every axis of a grid, applied along any subset of axes.
#[derive(Debug, Clone)]
pub struct GridFft {
    grid: GridSpec,
    plans: Vec<FftPlan>,
}

impl GridFft {
    pub fn new(grid: GridSpec) -> Result<Self> {
        let plans = grid.axes().iter().map(|a| FftPlan::new(a.nodes)).collect::<Result<_>>()?;
        Ok(Self { grid, plans })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn transform_axis(&self, data: &mut [Complex64], axis: usize, dir: Direction) {
        let n = self.grid.axis(axis).nodes;
        let stride = self.grid.stride(axis);
        let total = self.grid.len();
        assert_eq!(data.len(), total);
        let plan = &self.plans[axis];
        if stride == 1 {
            for line in data.chunks_exact_mut(n) {
                plan.process(line, dir);
            }
            return;
        }
        let mut line = alloc::vec![Complex64::new(0.0, 0.0); n];
        let block = stride * n;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                plan.process(&mut line, dir);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }

    pub fn transform(&self, data: &mut [Complex64], axes: &[usize], dir: Direction) {
        for &a in axes {
            self.transform_axis(data, a, dir);
        }
    }

    pub fn forward_all(&self, data: &mut [Complex64]) {
        for a in 0..self.grid.dim() {
            self.transform_axis(data, a, Direction::Forward);
        }
    }

    pub fn inverse_all(&self, data: &mut [Complex64]) {
        for a in 0..self.grid.dim() {
            self.transform_axis(data, a, Direction::Inverse);
        }
    }
}

/// Signed integer wavenumber index of FFT bin `j` on an `n`-point axis.
/// The Nyquist bin maps to `-n/2`.
pub fn signed_mode(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Angular wavenumber `2π m / L` of bin `j`.
pub fn wavenumber(j: usize, n: usize, length: f64) -> f64 {
    2.0 * PI * signed_mode(j, n) as f64 / length
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, &v)| {
                    let th = -2.0 * PI * (j * k) as f64 / n as f64;
                    acc + v * Complex64::new(libm::cos(th), libm::sin(th))
                })
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for &n in &[1usize, 2, 4, 8, 64] {
            let x: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(libm::sin(i as f64 * 0.7) + 0.1, libm::cos(i as f64 * 1.3)))
                .collect();
            let mut y = x.clone();
            FftPlan::new(n).unwrap().process(&mut y, Direction::Forward);
            let z = naive_dft(&x);
            for (a, b) in y.iter().zip(&z) {
                assert!((a - b).norm() < 1e-12 * n as f64);
            }
            FftPlan::new(n).unwrap().process(&mut y, Direction::Inverse);
            for (a, b) in y.iter().zip(&x) {
                assert!((a - b).norm() < 1e-14 * n as f64);
            }
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(FftPlan::new(12).unwrap_err(), Error::NotPowerOfTwo(12));
    }

    #[test]
    fn wavenumbers_are_signed() {
        assert_eq!(signed_mode(0, 8), 0);
        assert_eq!(signed_mode(3, 8), 3);
        assert_eq!(signed_mode(4, 8), -4);
        assert_eq!(signed_mode(7, 8), -1);
    }
}
