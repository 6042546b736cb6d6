//! Brute-force cross-checks that share no code path with the bound or the
//! operator builders.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{Bipartition, FockBasis, Side};
use crate::linalg::{eigvalsh_desc, CMatrix, C64};
use crate::operators::{build_bose_hubbard, ModelKind, ModelSpec};
use crate::random::seeded_rng;
use crate::state::DensityMatrix;

/// Largest Hilbert space the entropy search accepts.
pub const ORACLE_MAX_DIM: usize = 20;

const ROTATION_ROUNDS: usize = 400;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleParameters {
    /// `slot_of[j]` is the basis state receiving the `j`-th eigenvalue
    /// (descending) in the best diagonal arrangement.
    pub slot_of: Vec<usize>,
    /// Small two-level rotations that lowered the entropy further.
    pub rotations_accepted: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Minimum `S(ρ_B)` found, in nats.
    pub best_entropy: f64,
    pub best_parameters: OracleParameters,
    pub trials: usize,
}

fn h(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Pairwise-swap descent on a diagonal arrangement. `slots[s]` holds the
/// eigenvalue index sitting on basis state `s`.
fn descend(p: &[f64], group: &[usize], slots: &mut [usize], weights: &mut [f64]) {
    let n = slots.len();
    loop {
        let mut improved = false;
        for s in 0..n {
            for r in s + 1..n {
                let (gs, gr) = (group[s], group[r]);
                if gs == gr {
                    continue;
                }
                let delta = p[slots[r]] - p[slots[s]];
                let (ws, wr) = (weights[gs] + delta, weights[gr] - delta);
                if h(ws) + h(wr) < h(weights[gs]) + h(weights[gr]) - 1e-15 {
                    weights[gs] = ws;
                    weights[gr] = wr;
                    slots.swap(s, r);
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

fn marginal_entropy<P: Bipartition + ?Sized>(rho: &CMatrix, split: &P) -> f64 {
    let kb = split.side_dim(Side::B);
    let mut out = CMatrix::zeros(kb, kb);
    let n = rho.nrows();
    for i in 0..n {
        for j in 0..n {
            if split.local_index(i, Side::A) == split.local_index(j, Side::A) {
                out[(split.local_index(i, Side::B), split.local_index(j, Side::B))] += rho[(i, j)];
            }
        }
    }
    eigvalsh_desc(&out).into_iter().map(|x| if x > 1e-12 { h(x) } else { 0.0 }).sum()
}

/// Applies a rotation by `theta` with phase `phi` on the pair `(i, j)`.
fn rotate(rho: &CMatrix, i: usize, j: usize, theta: f64, phi: f64) -> CMatrix {
    let (c, s) = (theta.cos(), theta.sin());
    let e = C64::from_polar(1.0, phi);
    let mut g = CMatrix::identity(rho.nrows(), rho.nrows());
    g[(i, i)] = C64::new(c, 0.0);
    g[(j, j)] = C64::new(c, 0.0);
    g[(i, j)] = -e.conj() * s;
    g[(j, i)] = e * s;
    &g * rho * g.adjoint()
}

/// Random search for the smallest `S(ρ_B)` over unitaries on the full
/// fixed-number space.
///
/// Each trial places the eigenvalues of `ρ_AB` on basis states in a random
/// order and descends by pairwise swaps; the best arrangement is then probed
/// with random small two-level rotations, kept only when they help.
pub fn brute_force_min_entropy<P: Bipartition + Sync + ?Sized>(
    rho: &DensityMatrix,
    split: &P,
    trials: usize,
    seed: u64,
) -> Result<OracleResult> {
    let dim = rho.dim();
    if dim > ORACLE_MAX_DIM {
        return Err(Error::SizeLimit {
            what: "oracle state",
            requested: dim,
            limit: ORACLE_MAX_DIM,
        });
    }
    if rho.tag() != split.tag() {
        return Err(Error::TagMismatch {
            expected: split.tag().to_string(),
            found: rho.tag().to_string(),
        });
    }
    let p: Vec<f64> = rho.eigenvalues().into_iter().map(|x| x.max(0.0)).collect();
    let group: Vec<usize> = (0..dim).map(|i| split.local_index(i, Side::B)).collect();
    let kb = split.side_dim(Side::B);

    let run = |trial: usize| {
        let mut rng = seeded_rng(seed.wrapping_add(trial as u64));
        let mut slots: Vec<usize> = (0..dim).collect();
        slots.shuffle(&mut rng);
        let mut weights = vec![0.0; kb];
        for (s, &j) in slots.iter().enumerate() {
            weights[group[s]] += p[j];
        }
        descend(&p, &group, &mut slots, &mut weights);
        (weights.iter().map(|&w| h(w)).sum::<f64>(), slots)
    };
    let (best_diag, slots) = (0..trials.max(1))
        .into_par_iter()
        .map(run)
        .reduce_with(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one trial");

    let mut state = CMatrix::zeros(dim, dim);
    let mut slot_of = vec![0; dim];
    for (s, &j) in slots.iter().enumerate() {
        state[(s, s)] = C64::new(p[j], 0.0);
        slot_of[j] = s;
    }
    let mut best = best_diag;
    let mut accepted = 0;
    let mut rng = seeded_rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    if dim >= 2 {
        for _ in 0..ROTATION_ROUNDS {
            let i = rng.random_range(0..dim);
            let j = (i + rng.random_range(1..dim)) % dim;
            let theta = rng.random_range(-0.05..0.05);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let trial = rotate(&state, i, j, theta, phi);
            let s = marginal_entropy(&trial, split);
            if s < best - 1e-14 {
                best = s;
                state = trial;
                accepted += 1;
            }
        }
    }
    Ok(OracleResult {
        best_entropy: best.max(0.0),
        best_parameters: OracleParameters {
            slot_of,
            rotations_accepted: accepted,
        },
        trials: trials.max(1),
    })
}

/// Largest truncated product space the second-quantized rebuild will form.
const FULL_SPACE_LIMIT: usize = 4096;

fn annihilator(cutoff: usize) -> CMatrix {
    let mut b = CMatrix::zeros(cutoff + 1, cutoff + 1);
    for n in 1..=cutoff {
        b[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    b
}

fn site_operator(op: &CMatrix, site: usize, sites: usize, local: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for s in 0..sites {
        let factor = if s == site { op.clone() } else { CMatrix::identity(local, local) };
        out = out.kronecker(&factor);
    }
    out
}

/// `H₀` built from Kronecker products of truncated `b` matrices on the
/// `(N+1)^L` product space, restricted to the states of `basis`.
pub fn second_quantized_hamiltonian(spec: &ModelSpec, basis: &FockBasis) -> Result<CMatrix> {
    if spec.kind != ModelKind::BoseHubbard || spec.sites != basis.sites() || spec.particles != basis.particles() {
        return Err(Error::BasisMismatch("oracle needs the Bose-Hubbard basis of the spec".into()));
    }
    let (l, local) = (spec.sites, spec.particles + 1);
    let full = (0..l).try_fold(1usize, |acc, _| acc.checked_mul(local));
    let full = match full {
        Some(d) if d <= FULL_SPACE_LIMIT => d,
        _ => {
            return Err(Error::SizeLimit {
                what: "truncated product space",
                requested: full.unwrap_or(usize::MAX),
                limit: FULL_SPACE_LIMIT,
            })
        }
    };
    let b = annihilator(spec.particles);
    let bs: Vec<CMatrix> = (0..l).map(|s| site_operator(&b, s, l, local)).collect();
    let mut hfull = CMatrix::zeros(full, full);
    for s in 0..l.saturating_sub(1) {
        let hop = bs[s].adjoint() * &bs[s + 1];
        hfull -= (&hop + hop.adjoint()).scale(spec.hopping);
    }
    for bsite in &bs {
        let n = bsite.adjoint() * bsite;
        let id = CMatrix::identity(full, full);
        hfull += (&n * (&n - id)).scale(spec.interaction / 2.0);
    }
    let flat: Vec<usize> = basis
        .states()
        .iter()
        .map(|occ| occ.as_slice().iter().fold(0, |acc, &n| acc * local + n))
        .collect();
    Ok(CMatrix::from_fn(basis.dim(), basis.dim(), |r, c| hfull[(flat[r], flat[c])]))
}

/// Compares the second-quantized rebuild with the direct builder to 1e-12.
pub fn second_quantized_matrix_check(spec: &ModelSpec, basis: &FockBasis) -> Result<bool> {
    let reference = second_quantized_hamiltonian(spec, basis)?;
    let built = build_bose_hubbard(spec, basis)?;
    Ok(reference
        .iter()
        .zip(built.matrix().iter())
        .all(|(a, b)| (a - b).norm() <= 1e-12))
}
