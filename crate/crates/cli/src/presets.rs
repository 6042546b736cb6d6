//! Built-in experiment configurations.
//!
//! Entropies are reported in bits (`base = "two"`) for every preset. Where
//! no step length is published, the value below was picked by scanning step
//! lengths and keeping the one that converged best within the stated time.

use qdistill_core::{ControlSet, LogBase, ModelSpec, Objective};

use crate::config::{
    ExperimentConfig, GreedySection, Mode, OutputSection, ReplaySection, SweepAxis, SweepSection,
    TimekeepingSection,
};

/// A named preset; groups expand to several configs.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub description: &'static str,
    pub configs: Vec<ExperimentConfig>,
}

fn bh(sites: usize, particles: usize, l_a: usize) -> ModelSpec {
    ModelSpec::bose_hubbard(sites, particles, 1.0, 1.0, l_a)
}

fn ising_controls() -> ControlSet {
    ControlSet::new(vec![1.0, 0.5, 0.3, 0.2, 0.1, 0.0]).expect("distinct values")
}

fn config(name: &str, mode: Mode, model: ModelSpec, beta: f64, dt: f64, total_time: f64, budget: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        mode,
        beta,
        base: LogBase::Two,
        controls: ControlSet::tenths(),
        budget_seconds: Some(budget),
        model,
        greedy: GreedySection::new(dt, total_time),
        replay: None,
        sweep: None,
        timekeeping: None,
        output: OutputSection::default(),
    }
}

/// `(N, L, δt, T)` for the single-site-cut Bose-Hubbard table.
pub const TABLE1_ROWS: [(usize, usize, f64, f64); 6] = [
    (1, 3, 0.3, 20.0),
    (2, 3, 0.1, 100.0),
    (3, 3, 0.1, 30.0),
    (2, 4, 0.1, 30.0),
    (3, 4, 0.1, 50.0),
    (4, 4, 0.1, 40.0),
];

/// `(qubits, δt, T)` for the Ising table.
pub const ISING_ROWS: [(usize, f64, f64); 6] = [
    (4, 0.2, 30.0),
    (5, 0.2, 500.0),
    (6, 0.2, 300.0),
    (7, 0.3, 420.0),
    (8, 1.0, 500.0),
    (10, 1.0, 220.0),
];

fn fig2a(name: &str) -> ExperimentConfig {
    config(name, Mode::Distill, bh(4, 2, 1), 1.0, 0.1, 30.0, 10.0)
}

fn fig3(name: &str, large: bool, mode: Mode, objective: Objective, dt: f64) -> ExperimentConfig {
    let model = if large { bh(6, 3, 2) } else { bh(5, 2, 2) };
    let mut c = config(name, mode, model, 2.0, dt, 240.0, 60.0);
    c.greedy.objective = objective;
    if mode == Mode::Replay {
        c.beta = 1.0;
        c.replay = Some(ReplaySection { source_beta: 2.0 });
    }
    c
}

fn with_objective(mut c: ExperimentConfig, objective: Objective) -> ExperimentConfig {
    c.greedy.objective = objective;
    c
}

pub fn all() -> Vec<Preset> {
    let mut out = Vec::new();
    for (n, l, dt, t) in TABLE1_ROWS {
        let name = format!("table1_{n}_{l}");
        out.push(Preset {
            description: "single-site cut Bose-Hubbard chain, final entropy vs bound",
            configs: vec![config(&name, Mode::Distill, bh(l, n, 1), 1.0, dt, t, 120.0)],
            name,
        });
    }

    out.push(Preset {
        name: "fig2a".into(),
        description: "S_B(t) for L=4, N=2, l_A=1, beta=1, dt=0.1",
        configs: vec![fig2a("fig2a")],
    });
    let mut b = config("fig2b", Mode::Sweep, bh(4, 2, 1), 1.0, 0.1, 30.0, 120.0);
    b.sweep = Some(SweepSection {
        axis: SweepAxis::Beta,
        values: vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0],
    });
    out.push(Preset {
        name: "fig2b".into(),
        description: "final S_B against beta, with initial entropy and bound",
        configs: vec![b],
    });
    let mut c = config("fig2c", Mode::Replay, bh(4, 2, 1), 5.0, 0.1, 30.0, 10.0);
    c.replay = Some(ReplaySection { source_beta: 1.0 });
    out.push(Preset {
        name: "fig2c".into(),
        description: "path found at beta=1 replayed at beta=5",
        configs: vec![c],
    });
    let mut d = config("fig2d", Mode::Sweep, bh(4, 2, 1), 1.0, 0.1, 30.0, 30.0);
    d.sweep = Some(SweepSection {
        axis: SweepAxis::Beta,
        values: vec![1.0, 2.0, 5.0],
    });
    out.push(Preset {
        name: "fig2d".into(),
        description: "boson number in B for beta in {1, 2, 5}",
        configs: vec![d],
    });
    out.push(Preset {
        name: "fig2e".into(),
        description: "control schedule gamma(t) of the fig2a run",
        configs: vec![fig2a("fig2e")],
    });

    out.push(Preset {
        name: "fig3a".into(),
        description: "L=5, N=2, l_A=2, beta=2, dt=0.6",
        configs: vec![fig3("fig3a", false, Mode::Distill, Objective::Entropy, 0.6)],
    });
    out.push(Preset {
        name: "fig3b".into(),
        description: "L=6, N=3, l_A=2, beta=2, dt=0.5",
        configs: vec![fig3("fig3b", true, Mode::Distill, Objective::Entropy, 0.5)],
    });
    out.push(Preset {
        name: "fig3c".into(),
        description: "fig3a path replayed at beta=1",
        configs: vec![fig3("fig3c", false, Mode::Replay, Objective::Entropy, 0.6)],
    });
    out.push(Preset {
        name: "fig3d".into(),
        description: "fig3b path replayed at beta=1",
        configs: vec![fig3("fig3d", true, Mode::Replay, Objective::Entropy, 0.5)],
    });

    for (n, dt, t) in ISING_ROWS {
        let name = format!("ising_table_s2_{n}");
        let budget = match n {
            10 => 7200.0,
            8 => 600.0,
            _ => 120.0,
        };
        let mut c = config(&name, Mode::Distill, ModelSpec::ising(n, 1.0, 1), 1.0, dt, t, budget);
        c.controls = ising_controls();
        out.push(Preset {
            name,
            description: "transverse-field Ising chain, final entropy vs qubit bound",
            configs: vec![c],
        });
    }

    let mut tk = config("timekeeping_bh", Mode::Timekeeping, bh(4, 2, 1), 1.0, 0.1, 30.0, 60.0);
    tk.timekeeping = Some(TimekeepingSection {
        sigmas: vec![0.0, 0.0125, 0.025, 0.05, 0.075, 0.1],
        points: 51,
    });
    out.push(Preset {
        name: "timekeeping_bh".into(),
        description: "relative final-entropy error under jittered steps, L=4, N=2, dt=0.1",
        configs: vec![tk],
    });
    let mut tki = config("timekeeping_ising", Mode::Timekeeping, ModelSpec::ising(6, 1.0, 1), 1.0, 0.5, 300.0, 120.0);
    tki.controls = ising_controls();
    tki.timekeeping = Some(TimekeepingSection {
        sigmas: vec![0.0, 0.01, 0.025, 0.05, 0.075, 0.1],
        points: 51,
    });
    out.push(Preset {
        name: "timekeeping_ising".into(),
        description: "relative final-entropy error under jittered steps, 6 qubits, dt=0.5",
        configs: vec![tki],
    });

    out.push(Preset {
        name: "purity_variants".into(),
        description: "purity-objective counterparts of fig2a, fig3a and fig3b",
        configs: vec![
            with_objective(fig2a("purity_fig2a"), Objective::Purity),
            fig3("purity_fig3a", false, Mode::Distill, Objective::Purity, 0.8),
            fig3("purity_fig3b", true, Mode::Distill, Objective::Purity, 0.5),
        ],
    });
    out
}

pub fn names() -> Vec<String> {
    all().into_iter().map(|p| p.name).collect()
}

pub fn lookup(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}
