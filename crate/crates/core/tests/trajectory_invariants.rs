use qdistill_core::{
    evolve, greedy_distill, propagator, purity, replay_path, von_neumann_entropy, ControlSet, ControlledSystem,
    GreedyConfig, LogBase, ModelSpec, Objective, Side, StepRecord,
};

fn check_run(sys: &ControlledSystem, cset: &ControlSet, cfg: &GreedyConfig, beta: f64) {
    let rho0 = sys.thermal_state(beta).unwrap();
    let (path, rec) = greedy_distill(sys, &rho0, cset, cfg).unwrap();
    assert_eq!(rec.series.len(), cfg.steps + 1);
    assert!(rec.max_unitarity_defect < 1e-10);
    let first = *rec.initial();
    for r in &rec.series {
        assert!((r.s_ab - first.s_ab).abs() < 1e-9);
        assert!(r.s_b >= rec.bound.bound_entropy - 1e-9);
        if sys.conserves_number() {
            assert!(((r.n_a + r.n_b) - (first.n_a + first.n_b)).abs() < 1e-10);
        }
    }

    // The chosen candidate is optimal among all candidates at every step.
    let mut rho = rho0.clone();
    for step in &path.steps {
        let score = |g: f64| {
            let next = evolve(&rho, &propagator(&sys.hamiltonian(g), step.dt)).unwrap();
            let b = sys.reduced(&next, Side::B).unwrap();
            match cfg.objective {
                Objective::Entropy => von_neumann_entropy(&b, cfg.base),
                Objective::Purity => -purity(&b),
            }
        };
        let chosen = score(step.gamma);
        for &g in cset.values() {
            assert!(chosen <= score(g) + cfg.tie_epsilon + 1e-12);
        }
        rho = evolve(&rho, &propagator(&sys.hamiltonian(step.gamma), step.dt)).unwrap();
    }
    let replayed = replay_path(sys, &rho0, &path).unwrap();
    assert_eq!(bits(&replayed.series), bits(&rec.series));
}

fn bits(series: &[StepRecord]) -> Vec<[u64; 9]> {
    series
        .iter()
        .map(|r| {
            [r.t, r.s_b, r.s_a, r.s_ab, r.i_ab, r.p_b, r.n_a, r.n_b, r.gamma.unwrap_or(f64::NAN)]
                .map(f64::to_bits)
        })
        .collect()
}

#[test]
fn bose_hubbard_trajectories() {
    for (l, n, l_a) in [(3, 1, 1), (3, 2, 1), (4, 2, 1), (4, 2, 2), (5, 2, 2)] {
        let sys = ControlledSystem::from_spec(&ModelSpec::bose_hubbard(l, n, 1.0, 1.0, l_a)).unwrap();
        for objective in [Objective::Entropy, Objective::Purity] {
            let cfg = GreedyConfig::new(0.2, 30).with_objective(objective).with_base(LogBase::Two);
            check_run(&sys, &ControlSet::tenths(), &cfg, 1.0);
        }
    }
}

#[test]
fn ising_trajectory_stays_above_qubit_floor() {
    let sys = ControlledSystem::from_spec(&ModelSpec::ising(4, 1.0, 1)).unwrap();
    let cset = ControlSet::new(vec![1.0, 0.5, 0.3, 0.2, 0.1, 0.0]).unwrap();
    check_run(&sys, &cset, &GreedyConfig::new(0.3, 30), 1.0);
}
