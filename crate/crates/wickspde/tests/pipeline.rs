use wickspde::config::{ExperimentConfig, OracleKind, Profile};
use wickspde::runner::{build_problem, run_oracles, solve, Initial, Solution};

fn config(text: &str) -> ExperimentConfig {
    let cfg = ExperimentConfig::parse(text).unwrap();
    cfg.validate().unwrap();
    cfg
}

#[test]
fn file_initial_data_round_trips_through_the_format() {
    let tmp = tempfile::tempdir().unwrap();
    let base = config("equation = heat\nT = 0.1\ndt = 0.01\ngrid.nx = 32\ninit.noise = 0.5\n");
    let p = build_problem(&base).unwrap();
    let Initial::Real(u0) = &p.initial else { panic!("heat data is real") };
    let path = tmp.path().join("u0.chaos");
    wickspde::chaos_io::save(u0, &path).unwrap();

    let mut from_file = base.clone();
    from_file.init.profile = Profile::File;
    from_file.init.file = Some(path);
    let q = build_problem(&from_file).unwrap();
    assert_eq!(q.initial, p.initial);
}

#[test]
fn kpz_paths_pass_the_hopf_cole_check() {
    let cfg = config(
        "equation = kpz\nT = 0.1\ndt = 0.001\ngrid.nx = 64\nnoise.time_extended = false\ninit.amplitude = 0.3\noracle.panel = closed-form\noracle.tolerance = 1e-3\n",
    );
    let tmp = tempfile::tempdir().unwrap();
    let outcome = wickspde::runner::run(&cfg, tmp.path()).unwrap();
    assert_eq!(outcome.reports.len(), 1);
    assert!(outcome.reports[0].pass, "{:?}", outcome.reports[0]);
}

#[test]
fn complex_equations_lift_real_profiles() {
    let cfg = config("equation = nls\nT = 0.05\ndt = 0.001\ngrid.nx = 128\ninit.profile = packet\noracle.panel = per-z\n");
    let p = build_problem(&cfg).unwrap();
    assert!(matches!(p.initial, Initial::Complex(_)));
    let Solution::Complex(h) = solve(&cfg, &p).unwrap() else { panic!("nls is complex") };
    let reports = run_oracles(&cfg, &p, h.final_field()).unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports.iter().all(|r| r.pass), "{reports:?}");
}

#[test]
fn strichartz_panel_reports_once() {
    let mut cfg = config("equation = schrodinger-additive\nT = 0.5\ndt = 0.01\ngrid.nx = 128\nnoise.kind = none\n");
    cfg.oracle.panel = vec![OracleKind::Strichartz];
    let p = build_problem(&cfg).unwrap();
    let reports = run_oracles(&cfg, &p, &p.initial.complexified()).unwrap();
    assert_eq!(reports.len(), 1);
    assert!(reports[0].pass);
}
