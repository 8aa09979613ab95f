use wickspde_core::grid::{Axis, GridSpec};
use wickspde_core::noise::{
    brownian_sheet_field, sample_path, smooth, white_noise_field, Chart, NoiseKind, NoiseSpec,
};

#[test]
fn brownian_motion_covariance_at_a_point_pair() {
    let g = GridSpec::new(&[Axis::space(16, 1.6).with_origin(0.0)]).unwrap();
    let spec = NoiseSpec::new(NoiseKind::Gaussian, 1, 200).with_chart(Chart::Identity);
    let b = brownian_sheet_field(&spec, &g).unwrap();
    // Nodes 3 and 7 sit at 0.3 and 0.7.
    assert!((b.covariance(3, 7) - 0.3).abs() < 0.05);
    assert!((b.covariance(7, 7) - 0.7).abs() < 0.05);
    assert_eq!(b.covariance(0, 0), 0.0);
}

#[test]
fn pointwise_variance_grows_with_the_basis() {
    let g = GridSpec::line(64, 20.0).unwrap();
    let centre = 32;
    let mut last = 0.0;
    for n in 1..=8 {
        let w = white_noise_field(&NoiseSpec::new(NoiseKind::Gaussian, 1, n), &g).unwrap();
        let (mean, var) = w.mean_variance();
        assert_eq!(mean.sup_norm(), 0.0);
        let v = var.data()[centre];
        // Odd Hermite functions vanish at the centre, so growth is weak.
        assert!(v >= last, "N = {n}");
        last = v;
    }
    assert!(last > 0.0);
}

#[test]
fn smoothing_composes() {
    let g = GridSpec::plane(16, 10.0, 16, 10.0).unwrap();
    let w = white_noise_field(&NoiseSpec::new(NoiseKind::Gaussian, 2, 6), &g).unwrap();
    let once = smooth(&w, 0.75).unwrap();
    let twice = smooth(&smooth(&w, 0.25).unwrap(), 0.5).unwrap();
    for ((_, _, a), (_, _, b)) in once.iter().zip(twice.iter()) {
        assert!(a.max_abs_diff(b) < 1e-12);
    }
}

#[test]
fn realised_paths_match_the_chaos_field() {
    let g = GridSpec::line(32, 10.0).unwrap().with_time(8, 1.0).unwrap();
    let spec = NoiseSpec::new(NoiseKind::Gaussian, 1, 5).time_extended(true).with_seed(9);
    let path = sample_path(&spec, &g).unwrap();
    let w = white_noise_field(&spec, &g).unwrap();
    assert!(w.sample_eval(&path.draws).unwrap().max_abs_diff(&path.field) < 1e-14);
    assert_eq!(sample_path(&spec, &g).unwrap(), path);
}

#[test]
fn poisson_counts_are_compensated() {
    let g = GridSpec::line(1024, 1024.0).unwrap();
    let spec = NoiseSpec::new(NoiseKind::Poisson, 1, 1).with_seed(3);
    let path = sample_path(&spec, &g).unwrap();
    let n = path.field.data().len() as f64;
    let mean = path.field.data().iter().sum::<f64>() / n;
    let var = path.field.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    // Unit cells: mean 0 and variance 1 (fourth central moment 4), within 4 standard errors.
    assert!(mean.abs() < 4.0 / n.sqrt(), "{mean}");
    assert!((var - 1.0).abs() < 4.0 * (3.0 / n).sqrt(), "{var}");
}

#[test]
fn dimension_mismatches_are_errors() {
    let g = GridSpec::line(16, 1.0).unwrap();
    assert!(white_noise_field(&NoiseSpec::new(NoiseKind::Gaussian, 2, 3), &g).is_err());
    assert!(white_noise_field(&NoiseSpec::new(NoiseKind::Gaussian, 1, 3).time_extended(true), &g).is_err());
    assert!(brownian_sheet_field(&NoiseSpec::new(NoiseKind::Poisson, 1, 3), &g).is_err());
}
