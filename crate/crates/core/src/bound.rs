//! Minimal subsystem entropy under particle-conserving unitaries.
//!
//! The eigenvalues of `ρ_AB` are sorted descending and poured, in order,
//! into the particle-number sectors sorted by decreasing A dimension. A
//! sector with A dimension `d_A` and B dimension `d_B` consumes
//! `d_A·d_B` eigenvalues; consecutive runs of `d_A` of them sum to one
//! eigenvalue `q` of the optimal `ρ_B`. The minimum is the Shannon entropy
//! of all the `q`.

use crate::error::{Error, Result};
use crate::fock::{Bipartition, BipartiteSplit, NonConservingSplit};
use crate::state::{shannon_entropy, DensityMatrix, LogBase};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectorEntry {
    pub n_a: usize,
    pub n_b: usize,
    pub d_a: usize,
    pub d_b: usize,
}

impl SectorEntry {
    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }
}

/// Sectors ordered by decreasing `d_A`, ties broken by `n_B` ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorPlan {
    pub sectors: Vec<SectorEntry>,
    pub total_dim: usize,
}

pub fn plan_sectors(split: &BipartiteSplit) -> SectorPlan {
    let n = split.particles();
    let mut sectors: Vec<SectorEntry> = (0..=n)
        .map(|n_a| SectorEntry {
            n_a,
            n_b: n - n_a,
            d_a: split.d_a()[n_a],
            d_b: split.d_b()[n - n_a],
        })
        .collect();
    sectors.sort_by(|x, y| y.d_a.cmp(&x.d_a).then(x.n_b.cmp(&y.n_b)));
    let total_dim = sectors.iter().map(SectorEntry::dim).sum();
    SectorPlan { sectors, total_dim }
}

/// The optimal `ρ_B` spectrum of one sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorWeights {
    /// `None` for qubit registers, which carry no particle number.
    pub n_b: Option<usize>,
    pub d_a: usize,
    pub q: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub bound_entropy: f64,
    pub base: LogBase,
    pub q_values: Vec<SectorWeights>,
    /// `Σ_k n_B(k) Σ_b q_{k,b}`: boson number of B in the optimal state
    /// (under the deterministic plan order).
    pub optimal_nb: Option<f64>,
    /// Spectrum of `ρ_AB`, descending.
    pub eigenvalues_used: Vec<f64>,
}

impl BoundReport {
    pub fn all_q(&self) -> impl Iterator<Item = f64> + '_ {
        self.q_values.iter().flat_map(|s| s.q.iter().copied())
    }
}

/// Consecutive chunk sums of the descending spectrum, per cell `(n_B, d_A, d_B)`.
fn fill(eigs: &[f64], cells: &[(Option<usize>, usize, usize)], base: LogBase) -> BoundReport {
    let mut pos = 0;
    let mut q_values = Vec::with_capacity(cells.len());
    for &(n_b, d_a, d_b) in cells {
        let q = (0..d_b)
            .map(|_| {
                let s: f64 = eigs[pos..pos + d_a].iter().map(|p| p.max(0.0)).sum();
                pos += d_a;
                s
            })
            .collect();
        q_values.push(SectorWeights { n_b, d_a, q });
    }
    let all: Vec<f64> = q_values.iter().flat_map(|s| s.q.iter().copied()).collect();
    let optimal_nb = q_values
        .iter()
        .map(|s| s.n_b.map(|n| n as f64 * s.q.iter().sum::<f64>()))
        .sum::<Option<f64>>();
    BoundReport {
        bound_entropy: shannon_entropy(&all, base),
        base,
        q_values,
        optimal_nb,
        eigenvalues_used: eigs.to_vec(),
    }
}

fn check_tag<P: Bipartition + ?Sized>(rho: &DensityMatrix, split: &P) -> Result<()> {
    if rho.tag() != split.tag() || rho.dim() != split.dim() {
        return Err(Error::TagMismatch {
            expected: split.tag().to_string(),
            found: rho.tag().to_string(),
        });
    }
    Ok(())
}

pub fn lower_bound(rho: &DensityMatrix, split: &BipartiteSplit, base: LogBase) -> Result<BoundReport> {
    check_tag(rho, split)?;
    let plan = plan_sectors(split);
    let cells: Vec<_> = plan
        .sectors
        .iter()
        .map(|s| (Some(s.n_b), s.d_a, s.d_b))
        .collect();
    Ok(fill(&rho.eigenvalues(), &cells, base))
}

/// Qubit version: chunks of `d_A` consecutive eigenvalues.
pub fn lower_bound_qubits(rho: &DensityMatrix, d_a: usize, base: LogBase) -> Result<BoundReport> {
    let dim = rho.dim();
    if d_a == 0 || !dim.is_multiple_of(d_a) {
        return Err(Error::NotDivisible { dim, d_a });
    }
    Ok(fill(&rho.eigenvalues(), &[(None, d_a, dim / d_a)], base))
}

/// Bound for a state on `⊕_{n ≤ N_max}` fixed-number spaces, grouped by `n_B`.
pub fn lower_bound_nonconserving(
    rho: &DensityMatrix,
    blocks: &NonConservingSplit,
    base: LogBase,
) -> Result<BoundReport> {
    check_tag(rho, blocks)?;
    let total: usize = blocks.blocks().iter().map(|b| b.dim()).sum();
    if total != rho.dim() {
        return Err(Error::InconsistentBlocks(format!(
            "blocks cover {total} states, state has {}",
            rho.dim()
        )));
    }
    let cells: Vec<_> = blocks
        .blocks()
        .iter()
        .map(|b| (Some(b.n_b), b.dim_a, b.dim_b))
        .collect();
    Ok(fill(&rho.eigenvalues(), &cells, base))
}
