use num_complex::Complex64;
use proptest::prelude::*;
use rustfft::FftPlanner;
use wickspde_core::fft::{Direction, FftPlan, GridFft};
use wickspde_core::grid::GridSpec;

fn signal(n: usize, seed: u64) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let t = (j as f64 + 1.0) * (seed as f64 + 0.37);
            Complex64::new(t.sin(), (1.7 * t).cos())
        })
        .collect()
}

fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn forward_matches_rustfft(log_n in 0u32..11, seed in 0u64..1000) {
        let n = 1usize << log_n;
        let x = signal(n, seed);
        let mut ours = x.clone();
        FftPlan::new(n).unwrap().process(&mut ours, Direction::Forward);
        let mut reference = x.clone();
        FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut reference);
        prop_assert!(max_gap(&ours, &reference) < 1e-10 * n as f64);
    }

    #[test]
    fn inverse_is_normalised(log_n in 0u32..11, seed in 0u64..1000) {
        let n = 1usize << log_n;
        let x = signal(n, seed);
        let mut y = x.clone();
        let plan = FftPlan::new(n).unwrap();
        plan.process(&mut y, Direction::Forward);
        plan.process(&mut y, Direction::Inverse);
        prop_assert!(max_gap(&x, &y) < 1e-12 * n as f64);
    }
}

#[test]
fn two_dimensional_transform_matches_row_column_reference() {
    let (nx, ny) = (16, 8);
    let grid = GridSpec::plane(nx, 1.0, ny, 2.0).unwrap();
    let x = signal(nx * ny, 5);
    let mut ours = x.clone();
    GridFft::new(grid).unwrap().forward_all(&mut ours);

    let mut planner = FftPlanner::<f64>::new();
    let mut reference = x.clone();
    let stride = grid.stride(1);
    let fx = planner.plan_fft_forward(nx);
    let fy = planner.plan_fft_forward(ny);
    for j in 0..ny {
        let mut row: Vec<Complex64> = (0..nx).map(|i| reference[i * grid.stride(0) + j * stride]).collect();
        fx.process(&mut row);
        for i in 0..nx {
            reference[i * grid.stride(0) + j * stride] = row[i];
        }
    }
    for i in 0..nx {
        let mut col: Vec<Complex64> = (0..ny).map(|j| reference[i * grid.stride(0) + j * stride]).collect();
        fy.process(&mut col);
        for j in 0..ny {
            reference[i * grid.stride(0) + j * stride] = col[j];
        }
    }
    assert!(max_gap(&ours, &reference) < 1e-10);
}

#[test]
fn non_power_of_two_is_rejected() {
    assert!(FftPlan::new(12).is_err());
    assert!(FftPlan::new(0).is_err());
}
