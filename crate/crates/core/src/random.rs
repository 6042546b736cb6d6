//! Seeded random states and unitaries for tests, oracles and benches.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::fock::{BasisTag, BipartiteSplit};
use crate::linalg::{CMatrix, C64};
use crate::state::DensityMatrix;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let qr = ginibre(n, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Full-rank mixed state `G G† / Tr(G G†)`.
pub fn random_density_matrix<R: Rng + ?Sized>(n: usize, tag: BasisTag, rng: &mut R) -> DensityMatrix {
    let g = ginibre(n, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_trusted(m.unscale(tr), tag)
}

/// Uniform point on the probability simplex.
pub fn random_probability_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Block-diagonal unitary with an independent Haar block on every
/// `(n_A, n_B)` sector. Such unitaries conserve `n̂_A` and `n̂_B`.
pub fn random_sector_unitary<R: Rng + ?Sized>(split: &BipartiteSplit, rng: &mut R) -> CMatrix {
    let n = split.d_a().iter().zip(split.d_b().iter().rev()).map(|(a, b)| a * b).sum();
    let mut u = CMatrix::zeros(n, n);
    for n_a in 0..=split.particles() {
        let members = split.sector_members(n_a);
        let block = haar_unitary(members.len(), rng);
        for (bi, &i) in members.iter().enumerate() {
            for (bj, &j) in members.iter().enumerate() {
                u[(i, j)] = block[(bi, bj)];
            }
        }
    }
    u
}
