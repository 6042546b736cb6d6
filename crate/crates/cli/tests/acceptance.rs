//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line (run with `--nocapture` to see passes).

use std::time::Instant;

use qdistill_cli::presets;
use qdistill_cli::runner::{execute, RunOutcome};
use qdistill_cli::ExperimentConfig;
use qdistill_core::oracle::brute_force_min_entropy;
use qdistill_core::system::Partition;
use qdistill_core::random::{random_density_matrix, random_sector_unitary, seeded_rng};
use qdistill_core::{
    enumerate_basis, lower_bound, lower_bound_qubits, partial_trace, split, von_neumann_entropy, Bipartition,
    ControlledSystem, DensityMatrix, ExperimentRecord, LogBase, ModelSpec, Side,
};

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn preset_configs(name: &str) -> Vec<ExperimentConfig> {
    presets::lookup(name).unwrap_or_else(|| panic!("missing preset {name}")).configs
}

fn run_preset(name: &str) -> RunOutcome {
    let cfgs = preset_configs(name);
    assert_eq!(cfgs.len(), 1, "{name} is a group");
    execute(&cfgs[0]).unwrap_or_else(|e| panic!("{name}: {e:#}"))
}

fn bh_thermal(l: usize, n: usize, l_a: usize, beta: f64) -> (ControlledSystem, DensityMatrix) {
    let sys = ControlledSystem::from_spec(&ModelSpec::bose_hubbard(l, n, 1.0, 1.0, l_a)).unwrap();
    let rho = sys.thermal_state(beta).unwrap();
    (sys, rho)
}

#[test]
fn criterion_01_single_site_cut_bound_equals_total_entropy() {
    let start = Instant::now();
    let (sys, rho) = bh_thermal(4, 2, 1, 1.0);
    let mut worst: f64 = 0.0;
    for base in [LogBase::Natural, LogBase::Two] {
        let b = sys.bound(&rho, base).unwrap().bound_entropy;
        worst = worst.max((b - von_neumann_entropy(&rho, base)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    report(1, worst <= 1e-10 && secs < 1.0, format!("max |bound - S_AB| = {worst:.2e}, {secs:.3} s"));
}

#[test]
fn criterion_02_two_site_cut_bound_values() {
    // (L, N, beta, published value), in the published order
    let cases = [(5, 2, 2.0, 0.219), (6, 3, 2.0, 1.067), (5, 2, 1.0, 0.347), (6, 3, 1.0, 1.738)];
    let mut matched = Vec::new();
    let mut details = Vec::new();
    for base in [LogBase::Natural, LogBase::Two] {
        let mut all = true;
        for (l, n, beta, want) in cases {
            let (sys, rho) = bh_thermal(l, n, 2, beta);
            let got = sys.bound(&rho, base).unwrap().bound_entropy;
            let ok = (got - want).abs() <= 0.01;
            all &= ok;
            details.push(format!("L={l} N={n} beta={beta} base={base}: {got:.4} vs {want}{}", if ok { "" } else { " x" }));
        }
        if all {
            matched.push(base.to_string());
        }
    }
    report(
        2,
        !matched.is_empty(),
        format!("matching bases {matched:?}; {}", details.join("; ")),
    );
}

const TABLE1_PUBLISHED: [(usize, usize, f64); 6] = [
    (1, 3, 0.016),
    (2, 3, 0.055),
    (3, 3, 0.039),
    (2, 4, 0.022),
    (3, 4, 0.034),
    (4, 4, 0.069),
];

#[test]
fn criterion_03_single_site_cut_convergence() {
    let mut pass = true;
    let mut details = Vec::new();
    for (n, l, published) in TABLE1_PUBLISHED {
        let out = run_preset(&format!("table1_{n}_{l}"));
        let s = &out.summary;
        let ok = s.difference <= published + 0.03 && s.wall_seconds < 120.0;
        pass &= ok;
        details.push(format!(
            "({n},{l}) dt={} T={} diff={:.4} limit={:.3} {:.1}s{}",
            s.delta_t,
            s.total_time.round(),
            s.difference,
            published + 0.03,
            s.wall_seconds,
            if ok { "" } else { " x" }
        ));
    }
    report(3, pass, details.join("; "));
}

fn bound_geometries(max_dim: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for l in 2..=7 {
        for n in 1..=4 {
            if enumerate_basis(l, n).unwrap().dim() <= max_dim {
                for l_a in 1..l {
                    out.push((l, n, l_a));
                }
            }
        }
    }
    out
}

fn grouped_min(p: &[f64], sizes: &[usize], bound: f64, violations: &mut usize) -> f64 {
    fn rec(k: usize, p: &[f64], sizes: &[usize], fill: &mut [usize], sums: &mut [f64], f: &mut dyn FnMut(&[f64])) {
        if k == p.len() {
            f(sums);
            return;
        }
        for g in 0..sizes.len() {
            if fill[g] == sizes[g] || (fill[g] == 0 && (0..g).any(|h| sizes[h] == sizes[g] && fill[h] == 0)) {
                continue;
            }
            fill[g] += 1;
            sums[g] += p[k];
            rec(k + 1, p, sizes, fill, sums, f);
            fill[g] -= 1;
            sums[g] -= p[k];
        }
    }
    let mut best = f64::INFINITY;
    let mut fill = vec![0; sizes.len()];
    let mut sums = vec![0.0; sizes.len()];
    rec(0, p, sizes, &mut fill, &mut sums, &mut |q| {
        let e: f64 = q.iter().filter(|&&x| x > 1e-12).map(|&x| -x * x.ln()).sum();
        if e < bound - 1e-12 {
            *violations += 1;
        }
        best = best.min(e);
    });
    best
}

#[test]
fn criterion_04_bound_validity() {
    let mut rng = seeded_rng(4);
    let mut worst_margin = f64::INFINITY;
    let mut unitaries = 0;
    for (l, n, l_a) in bound_geometries(30) {
        let basis = enumerate_basis(l, n).unwrap();
        let s = split(&basis, l_a).unwrap();
        let rho = random_density_matrix(basis.dim(), basis.tag(), &mut rng);
        let bound = lower_bound(&rho, &s, LogBase::Natural).unwrap().bound_entropy;
        for _ in 0..200 {
            let u = random_sector_unitary(&s, &mut rng);
            let moved = DensityMatrix::new(&u * rho.matrix() * u.adjoint(), basis.tag()).unwrap();
            let s_b = von_neumann_entropy(&partial_trace(&moved, &s, Side::B).unwrap(), LogBase::Natural);
            worst_margin = worst_margin.min(s_b - bound);
            unitaries += 1;
        }
    }
    let mut violations = 0;
    let mut worst_gap: f64 = 0.0;
    let exhaustive = bound_geometries(12);
    for &(l, n, l_a) in &exhaustive {
        let basis = enumerate_basis(l, n).unwrap();
        let s = split(&basis, l_a).unwrap();
        let rho = random_density_matrix(basis.dim(), basis.tag(), &mut rng);
        let bound = lower_bound(&rho, &s, LogBase::Natural).unwrap().bound_entropy;
        let mut sizes = vec![0; s.side_dim(Side::B)];
        for i in 0..s.dim() {
            sizes[s.local_index(i, Side::B)] += 1;
        }
        let best = grouped_min(&rho.eigenvalues(), &sizes, bound, &mut violations);
        worst_gap = worst_gap.max((best - bound).abs());
    }
    report(
        4,
        worst_margin >= -1e-9 && violations == 0 && worst_gap < 1e-12,
        format!(
            "{unitaries} unitaries, min S_B - bound = {worst_margin:.3e}; {} exhaustive geometries, {violations} groupings below the sorted fill, |min - bound| <= {worst_gap:.1e}",
            exhaustive.len()
        ),
    );
}

#[test]
fn criterion_05_oracle_agreement() {
    let mut below = 0;
    let mut worst_gap: f64 = 0.0;
    let mut states = 0;
    for (l, n, l_a) in bound_geometries(12) {
        let basis = enumerate_basis(l, n).unwrap();
        let s = split(&basis, l_a).unwrap();
        let mut rng = seeded_rng(500 + (l * 100 + n * 10 + l_a) as u64);
        for k in 0..50 {
            let rho = random_density_matrix(basis.dim(), basis.tag(), &mut rng);
            let bound = lower_bound(&rho, &s, LogBase::Natural).unwrap().bound_entropy;
            let found = brute_force_min_entropy(&rho, &s, 2000, k).unwrap().best_entropy;
            if found < bound - 1e-9 {
                below += 1;
            }
            worst_gap = worst_gap.max(found - bound);
            states += 1;
        }
    }
    report(
        5,
        below == 0 && worst_gap <= 1e-3,
        format!("{states} states, {below} below the bound, max oracle - bound = {worst_gap:.2e}"),
    );
}

fn conservation(record: &ExperimentRecord) -> (f64, f64) {
    let first = record.initial();
    let mut ds: f64 = 0.0;
    let mut dn: f64 = 0.0;
    for r in &record.series {
        ds = ds.max((r.s_ab - first.s_ab).abs());
        let total = r.n_a + r.n_b;
        if total.is_finite() {
            dn = dn.max((total - (first.n_a + first.n_b)).abs());
        }
    }
    (ds, dn)
}

#[test]
fn criterion_06_conservation_and_unitarity() {
    let names = [
        "table1_1_3", "table1_2_3", "table1_3_3", "table1_2_4", "table1_3_4", "table1_4_4", "fig2a", "fig2c", "fig3a",
        "fig3b", "fig3c", "fig3d", "ising_table_s2_4", "ising_table_s2_6",
    ];
    let (mut ds, mut dn, mut du) = (0.0f64, 0.0f64, 0.0f64);
    let mut runs = 0;
    for name in names {
        let out = run_preset(name);
        for rec in out.record.iter().chain(out.source_record.iter()) {
            let (s, n) = conservation(rec);
            ds = ds.max(s);
            dn = dn.max(n);
            du = du.max(rec.max_unitarity_defect);
            runs += 1;
        }
    }
    report(
        6,
        ds <= 1e-9 && dn <= 1e-10 && du <= 1e-10,
        format!("{runs} trajectories: max |dS_AB| = {ds:.2e}, max |dN| = {dn:.2e}, max unitarity defect = {du:.2e}"),
    );
}

#[test]
fn criterion_07_cross_temperature_replay() {
    let out = run_preset("fig2c");
    let s = &out.summary;
    report(
        7,
        s.difference <= 0.1,
        format!("beta=1 path at beta=5: final {:.4}, bound {:.4}, diff {:.4}", s.final_entropy, s.bound, s.difference),
    );
}

#[test]
fn criterion_08_boson_grouping_trend() {
    let out = run_preset("fig2d");
    let rows = &out.sweep;
    let gains = rows.iter().all(|r| r.final_n_b > r.initial_n_b);
    let monotone = rows.windows(2).all(|w| w[1].final_n_b > w[0].final_n_b);
    let detail = rows
        .iter()
        .map(|r| format!("beta={}: n_B {:.3} -> {:.3}", r.value, r.initial_n_b, r.final_n_b))
        .collect::<Vec<_>>()
        .join("; ");
    report(8, rows.len() == 3 && gains && monotone, detail);
}

#[test]
fn criterion_09_ising_convergence() {
    let out = run_preset("ising_table_s2_6");
    let s = &out.summary;
    let rec = out.record.as_ref().unwrap();
    let sys = ControlledSystem::from_spec(&out.config.model).unwrap();
    let rho0 = sys.thermal_state(out.config.beta).unwrap();
    let Partition::Qubits(q) = sys.partition() else {
        panic!("Ising preset without a qubit partition")
    };
    let floor = lower_bound_qubits(&rho0, q.d_a(), out.config.base).unwrap().bound_entropy;
    let min_margin = rec.series.iter().map(|r| r.s_b - floor).fold(f64::INFINITY, f64::min);
    report(
        9,
        s.difference <= 0.019 + 0.03 && min_margin >= -1e-9 && (floor - s.bound).abs() < 1e-12,
        format!(
            "dt={} T={}: diff {:.4} (limit 0.049), min S_B - floor {:.2e}",
            s.delta_t,
            s.total_time.round(),
            s.difference,
            min_margin
        ),
    );
}

fn error_at(out: &RunOutcome, sigma: f64) -> f64 {
    out.timekeeping
        .iter()
        .find(|p| (p.sigma - sigma).abs() < 1e-12)
        .unwrap_or_else(|| panic!("sigma {sigma} not on the grid"))
        .relative_error
}

#[test]
fn criterion_10_timekeeping_robustness() {
    let bh = run_preset("timekeeping_bh");
    let ising = run_preset("timekeeping_ising");
    let e_bh = error_at(&bh, bh.summary.delta_t);
    let e_is = error_at(&ising, 0.05);
    report(
        10,
        e_bh < 0.1 && e_is < 0.05,
        format!(
            "Bose-Hubbard sigma=dt={}: {e_bh:.4} (< 0.1); Ising dt={} sigma=0.05: {e_is:.4} (< 0.05)",
            bh.summary.delta_t, ising.summary.delta_t
        ),
    );
}

#[test]
fn criterion_11_purity_objective_equivalence() {
    let purity = presets::lookup("purity_variants").unwrap().configs;
    let mut pass = true;
    let mut details = Vec::new();
    for (entropy_name, p_cfg) in ["fig2a", "fig3a", "fig3b"].into_iter().zip(purity) {
        let e = run_preset(entropy_name).summary.final_entropy;
        let p = execute(&p_cfg).unwrap().summary.final_entropy;
        let ok = (e - p).abs() <= 0.05;
        pass &= ok;
        details.push(format!(
            "{entropy_name}: entropy {e:.4} vs purity {p:.4} (|d| = {:.4}){}",
            (e - p).abs(),
            if ok { "" } else { " x" }
        ));
    }
    report(11, pass, details.join("; "));
}

/// Presets whose full run exceeds this budget are rerun on a shortened
/// schedule for the byte-identity check.
const DETERMINISM_BUDGET_SECONDS: f64 = 120.0;
const SHORTENED_STEPS: usize = 20;

#[test]
fn criterion_12_determinism() {
    let mut checked = 0;
    let mut shortened = Vec::new();
    let mut mismatched = Vec::new();
    for preset in presets::all() {
        for mut cfg in preset.configs {
            if cfg.budget_seconds.unwrap_or(0.0) > DETERMINISM_BUDGET_SECONDS {
                cfg.greedy.total_time = None;
                cfg.greedy.steps = Some(SHORTENED_STEPS);
                shortened.push(cfg.name.clone());
            }
            let a = execute(&cfg).unwrap();
            let b = execute(&cfg).unwrap();
            let csv = |o: &RunOutcome| {
                o.artifacts
                    .iter()
                    .filter(|x| x.file_name.ends_with(".csv"))
                    .map(|x| (x.file_name.clone(), x.bytes.clone()))
                    .collect::<Vec<_>>()
            };
            let (ca, cb) = (csv(&a), csv(&b));
            if ca.is_empty() || ca != cb {
                mismatched.push(cfg.name.clone());
            }
            checked += 1;
        }
    }
    report(
        12,
        mismatched.is_empty(),
        format!("{checked} configs rerun, mismatched {mismatched:?}, shortened to {SHORTENED_STEPS} steps: {shortened:?}"),
    );
}
