use qdistill_core::oracle::{brute_force_min_entropy, second_quantized_matrix_check};
use qdistill_core::random::{random_density_matrix, seeded_rng};
use qdistill_core::{enumerate_basis, lower_bound, split, LogBase, ModelSpec};
use rayon::prelude::*;

const STATES_PER_GEOMETRY: usize = 50;
const TRIALS: usize = 2000;

fn small_geometries() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for l in 2..=6 {
        for n in 1..=4 {
            let d = enumerate_basis(l, n).unwrap().dim();
            if d <= 12 {
                for l_a in 1..l {
                    out.push((l, n, l_a));
                }
            }
        }
    }
    out
}

#[test]
fn oracle_never_beats_and_reaches_the_bound() {
    let worst: Vec<(String, f64)> = small_geometries()
        .into_par_iter()
        .map(|(l, n, l_a)| {
            let basis = enumerate_basis(l, n).unwrap();
            let s = split(&basis, l_a).unwrap();
            let mut rng = seeded_rng((l * 100 + n * 10 + l_a) as u64);
            let mut gap_max: f64 = 0.0;
            for k in 0..STATES_PER_GEOMETRY {
                let rho = random_density_matrix(basis.dim(), basis.tag(), &mut rng);
                let bound = lower_bound(&rho, &s, LogBase::Natural).unwrap().bound_entropy;
                let found = brute_force_min_entropy(&rho, &s, TRIALS, k as u64).unwrap();
                let gap = found.best_entropy - bound;
                assert!(gap >= -1e-9, "oracle beat the bound at L={l} N={n} l_A={l_a}: {gap}");
                gap_max = gap_max.max(gap);
            }
            (format!("L={l} N={n} l_A={l_a}"), gap_max)
        })
        .collect();
    for (name, gap) in worst {
        assert!(gap < 1e-3, "{name}: oracle stayed {gap} above the bound");
    }
}

#[test]
fn three_site_two_site_cut_single_particle() {
    let basis = enumerate_basis(3, 1).unwrap();
    let s = split(&basis, 2).unwrap();
    let mut rng = seeded_rng(31);
    let rho = random_density_matrix(3, basis.tag(), &mut rng);
    let bound = lower_bound(&rho, &s, LogBase::Natural).unwrap().bound_entropy;
    let found = brute_force_min_entropy(&rho, &s, 500, 0).unwrap();
    assert!(found.best_entropy >= bound - 1e-9);
    assert!(found.best_entropy - bound < 1e-3);
}

#[test]
fn second_quantized_rebuild_agrees() {
    for (l, n, j, u) in [(2, 1, 1.0, 1.0), (3, 2, 1.0, 1.0), (3, 3, 0.5, 2.0), (4, 2, 0.7, -1.3), (5, 2, 1.0, 1.0)] {
        let spec = ModelSpec::bose_hubbard(l, n, j, u, 1);
        let basis = enumerate_basis(l, n).unwrap();
        assert!(second_quantized_matrix_check(&spec, &basis).unwrap());
    }
}
