use qdistill_core::{
    greedy_distill, greedy_distill_random_dt, timekeeping_robustness, ControlSet, ControlledSystem, ExperimentRecord,
    GreedyConfig, LogBase, ModelSpec,
};

fn steps_to_reach(rec: &ExperimentRecord, tol: f64) -> Option<usize> {
    rec.series.iter().position(|r| r.s_b - rec.bound.bound_entropy <= tol)
}

fn setup() -> (ControlledSystem, qdistill_core::DensityMatrix) {
    let sys = ControlledSystem::from_spec(&ModelSpec::bose_hubbard(4, 2, 1.0, 1.0, 1)).unwrap();
    let rho = sys.thermal_state(1.0).unwrap();
    (sys, rho)
}

#[test]
fn some_random_dt_seed_converges_faster() {
    let (sys, rho) = setup();
    let cset = ControlSet::tenths();
    let cfg = GreedyConfig::for_duration(0.1, 30.0).with_base(LogBase::Two);
    let (_, fixed) = greedy_distill(&sys, &rho, &cset, &cfg).unwrap();
    let reference = steps_to_reach(&fixed, 0.05).unwrap_or(usize::MAX);
    let faster = (0..20u64)
        .filter_map(|seed| {
            let (_, rec) = greedy_distill_random_dt(&sys, &rho, &cset, &cfg.clone().with_random_dt(0.05, seed)).unwrap();
            steps_to_reach(&rec, 0.05)
        })
        .filter(|&s| s < reference)
        .count();
    assert!(faster >= 1, "deterministic run needs {reference} steps; no seed beat it");
}

#[test]
fn random_dt_path_records_clipped_positive_durations() {
    let (sys, rho) = setup();
    let cfg = GreedyConfig::new(0.1, 200).with_random_dt(0.2, 3);
    let (path, _) = greedy_distill_random_dt(&sys, &rho, &ControlSet::tenths(), &cfg).unwrap();
    assert!(path.steps.iter().all(|s| s.dt >= 0.1 / 100.0));
    assert!(path.steps.iter().any(|s| (s.dt - 0.1).abs() > 1e-6));
}

#[test]
fn timekeeping_error_grows_with_sigma() {
    let (sys, rho) = setup();
    let cfg = GreedyConfig::for_duration(0.1, 30.0).with_base(LogBase::Two);
    let (path, _) = greedy_distill(&sys, &rho, &ControlSet::tenths(), &cfg).unwrap();
    let sigmas = [0.0, 0.025, 0.05, 0.1];
    let points = timekeeping_robustness(&sys, &rho, &path, &sigmas, 51).unwrap();
    assert_eq!(points[0].relative_error, 0.0);
    for w in points.windows(2) {
        assert!(w[1].relative_error >= w[0].relative_error - 1e-6, "{points:?}");
    }
    assert!(points[3].relative_error < 0.1);
}
