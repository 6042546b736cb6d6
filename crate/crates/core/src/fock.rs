//! Occupation-number bases and their bipartite sector structure.
//!
//! Basis states of `L` sites holding `N` bosons are ordered lexicographically
//! descending on the occupation vector, so `|N,0,…,0⟩` is index 0. Inside a
//! particle-number sector `(n_A, n_B)` this ordering is A-major: the A-local
//! index varies slower than the B-local one.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Particles per site, `|n_1, …, n_L⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationVector(Vec<usize>);

impl OccupationVector {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self(occupations)
    }

    pub fn sites(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Particles on sites `[start, end)` (0-based).
    pub fn count_in(&self, start: usize, end: usize) -> usize {
        self.0[start..end].iter().sum()
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

/// Identifies the Hilbert space a matrix lives on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasisTag {
    Fock { sites: usize, particles: usize },
    FockTruncated { sites: usize, max_particles: usize },
    Qubits { sites: usize },
    Reduced { parent: Box<BasisTag>, l_a: usize, side: Side },
    /// Untagged matrices (tests, generic linear algebra).
    Generic { dim: usize },
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTag::Fock { sites, particles } => write!(f, "fock(L={sites},N={particles})"),
            BasisTag::FockTruncated {
                sites,
                max_particles,
            } => write!(f, "fock(L={sites},N<={max_particles})"),
            BasisTag::Qubits { sites } => write!(f, "qubits(L={sites})"),
            BasisTag::Reduced { parent, l_a, side } => {
                write!(f, "{parent}|l_A={l_a}|{side:?}")
            }
            BasisTag::Generic { dim } => write!(f, "generic(dim={dim})"),
        }
    }
}

/// Number of ways to place `particles` bosons on `sites` sites,
/// `(N+L-1)! / (N! (L-1)!)`, with overflow checks.
pub fn fock_dimension(sites: usize, particles: usize) -> Result<usize> {
    if sites == 0 {
        return Err(Error::NoSites);
    }
    let overflow = Error::DimensionOverflow { sites, particles };
    // C(n+k, k) with k = min(N, L-1), built incrementally so every
    // intermediate value is itself a binomial coefficient.
    let n = particles.checked_add(sites - 1).ok_or(overflow.clone())?;
    let k = particles.min(sites - 1);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(overflow.clone())?
            / (i as u128 + 1);
    }
    usize::try_from(acc).map_err(|_| overflow)
}

/// Compositions of `total` into `parts` non-negative integers,
/// lexicographically descending.
fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, remaining: usize, parts_left: usize, out: &mut Vec<Vec<usize>>) {
        if parts_left == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for n in (0..=remaining).rev() {
            prefix.push(n);
            rec(prefix, remaining - n, parts_left - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        return out;
    }
    rec(&mut Vec::with_capacity(parts), total, parts, &mut out);
    out
}

/// Fixed-particle-number occupation basis of an open chain.
#[derive(Clone, Debug)]
pub struct FockBasis {
    sites: usize,
    particles: usize,
    states: Vec<OccupationVector>,
    index: HashMap<OccupationVector, usize>,
}

pub fn enumerate_basis(sites: usize, particles: usize) -> Result<FockBasis> {
    let expected = fock_dimension(sites, particles)?;
    let states: Vec<OccupationVector> = compositions(sites, particles)
        .into_iter()
        .map(OccupationVector)
        .collect();
    debug_assert_eq!(states.len(), expected);
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(FockBasis {
        sites,
        particles,
        states,
        index,
    })
}

impl FockBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &OccupationVector {
        &self.states[index]
    }

    pub fn index_of(&self, occupations: &OccupationVector) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::Fock {
            sites: self.sites,
            particles: self.particles,
        }
    }
}

/// Access to the local (A, B) coordinates of each basis index. Partial
/// traces and subsystem observables are written against this trait.
pub trait Bipartition {
    fn tag(&self) -> &BasisTag;
    fn l_a(&self) -> usize;
    fn dim(&self) -> usize;
    fn side_dim(&self, side: Side) -> usize;
    fn local_index(&self, index: usize, side: Side) -> usize;
    /// Particle number of a local basis state, when the model has one.
    fn local_particles(&self, local: usize, side: Side) -> Option<usize>;

    fn reduced_tag(&self, side: Side) -> BasisTag {
        BasisTag::Reduced {
            parent: Box::new(self.tag().clone()),
            l_a: self.l_a(),
            side,
        }
    }
}

/// Position of a basis state inside its `(n_A, n_B)` sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SectorCoord {
    pub n_a: usize,
    pub n_b: usize,
    pub a_index: usize,
    pub b_index: usize,
}

/// Local occupation basis of one side: every occupation of `sites` sites
/// with `0..=max_particles` particles, ordered by particle number
/// descending and lexicographically descending within a number.
#[derive(Clone, Debug)]
struct LocalBasis {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    particles: Vec<usize>,
}

impl LocalBasis {
    fn new(sites: usize, max_particles: usize) -> Result<Self> {
        let dims = (0..=max_particles)
            .map(|n| fock_dimension(sites, n))
            .collect::<Result<Vec<_>>>()?;
        let mut offsets = vec![0; max_particles + 1];
        let mut acc = 0;
        for n in (0..=max_particles).rev() {
            offsets[n] = acc;
            acc += dims[n];
        }
        let mut particles = Vec::with_capacity(acc);
        for n in (0..=max_particles).rev() {
            particles.extend(std::iter::repeat_n(n, dims[n]));
        }
        Ok(Self {
            dims,
            offsets,
            particles,
        })
    }

    fn len(&self) -> usize {
        self.particles.len()
    }

    fn global(&self, n: usize, local: usize) -> usize {
        self.offsets[n] + local
    }
}

/// Index maps for the subsystem occupation vectors, keyed by side.
fn local_lookup(sites: usize, max_particles: usize) -> HashMap<Vec<usize>, usize> {
    let mut map = HashMap::new();
    for n in 0..=max_particles {
        for (i, occ) in compositions(sites, n).into_iter().enumerate() {
            map.insert(occ, i);
        }
    }
    map
}

/// A fixed-`N` Fock basis cut after site `l_A` into subsystems A and B.
#[derive(Clone, Debug)]
pub struct BipartiteSplit {
    tag: BasisTag,
    particles: usize,
    l_a: usize,
    l_b: usize,
    sector_of: Vec<SectorCoord>,
    local_a: LocalBasis,
    local_b: LocalBasis,
}

pub fn split(basis: &FockBasis, l_a: usize) -> Result<BipartiteSplit> {
    let sites = basis.sites();
    if l_a == 0 || l_a >= sites {
        return Err(Error::SplitOutOfRange {
            l_a,
            sites,
            max: sites.saturating_sub(1),
        });
    }
    let l_b = sites - l_a;
    let n = basis.particles();
    let local_a = LocalBasis::new(l_a, n)?;
    let local_b = LocalBasis::new(l_b, n)?;
    let a_lookup = local_lookup(l_a, n);
    let b_lookup = local_lookup(l_b, n);
    let sector_of = basis
        .states()
        .iter()
        .map(|s| {
            let occ = s.as_slice();
            SectorCoord {
                n_a: s.count_in(0, l_a),
                n_b: s.count_in(l_a, sites),
                a_index: a_lookup[&occ[..l_a]],
                b_index: b_lookup[&occ[l_a..]],
            }
        })
        .collect();
    Ok(BipartiteSplit {
        tag: basis.tag(),
        particles: n,
        l_a,
        l_b,
        sector_of,
        local_a,
        local_b,
    })
}

impl BipartiteSplit {
    pub fn l_b(&self) -> usize {
        self.l_b
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// `d_A[i]`: dimension of the A space holding `i` particles.
    pub fn d_a(&self) -> &[usize] {
        &self.local_a.dims
    }

    pub fn d_b(&self) -> &[usize] {
        &self.local_b.dims
    }

    pub fn sector_of(&self, index: usize) -> SectorCoord {
        self.sector_of[index]
    }

    /// Basis indices of the `(n_A, N - n_A)` sector in basis order.
    pub fn sector_members(&self, n_a: usize) -> Vec<usize> {
        (0..self.sector_of.len())
            .filter(|&i| self.sector_of[i].n_a == n_a)
            .collect()
    }
}

impl Bipartition for BipartiteSplit {
    fn tag(&self) -> &BasisTag {
        &self.tag
    }

    fn l_a(&self) -> usize {
        self.l_a
    }

    fn dim(&self) -> usize {
        self.sector_of.len()
    }

    fn side_dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.local_a.len(),
            Side::B => self.local_b.len(),
        }
    }

    fn local_index(&self, index: usize, side: Side) -> usize {
        let c = self.sector_of[index];
        match side {
            Side::A => self.local_a.global(c.n_a, c.a_index),
            Side::B => self.local_b.global(c.n_b, c.b_index),
        }
    }

    fn local_particles(&self, local: usize, side: Side) -> Option<usize> {
        Some(match side {
            Side::A => self.local_a.particles[local],
            Side::B => self.local_b.particles[local],
        })
    }
}

/// Qubit register `(C²)^{⊗L}` with qubit 1 as the most significant bit,
/// cut after qubit `l_A`.
#[derive(Clone, Debug)]
pub struct QubitSplit {
    tag: BasisTag,
    sites: usize,
    l_a: usize,
}

impl QubitSplit {
    pub fn new(sites: usize, l_a: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::NoSites);
        }
        if l_a == 0 || l_a >= sites {
            return Err(Error::SplitOutOfRange {
                l_a,
                sites,
                max: sites.saturating_sub(1),
            });
        }
        if sites >= usize::BITS as usize {
            return Err(Error::DimensionOverflow {
                sites,
                particles: 0,
            });
        }
        Ok(Self {
            tag: BasisTag::Qubits { sites },
            sites,
            l_a,
        })
    }

    pub fn d_a(&self) -> usize {
        1 << self.l_a
    }
}

impl Bipartition for QubitSplit {
    fn tag(&self) -> &BasisTag {
        &self.tag
    }

    fn l_a(&self) -> usize {
        self.l_a
    }

    fn dim(&self) -> usize {
        1 << self.sites
    }

    fn side_dim(&self, side: Side) -> usize {
        match side {
            Side::A => 1 << self.l_a,
            Side::B => 1 << (self.sites - self.l_a),
        }
    }

    fn local_index(&self, index: usize, side: Side) -> usize {
        let l_b = self.sites - self.l_a;
        match side {
            Side::A => index >> l_b,
            Side::B => index & ((1 << l_b) - 1),
        }
    }

    fn local_particles(&self, _local: usize, _side: Side) -> Option<usize> {
        None
    }
}

/// One `n_B` block of a particle-number-truncated space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberBlock {
    pub n_b: usize,
    /// A-side dimension summed over every contributing total number.
    pub dim_a: usize,
    pub dim_b: usize,
    /// Global indices of the states in this block.
    pub members: Vec<usize>,
}

impl NumberBlock {
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }
}

/// Direct sum of fixed-`n` bases `n = 0..=N_max`, regrouped by `n_B`.
///
/// Global index of state `j` in the `n`-particle basis is
/// `offset[n] + j`, with `n` ascending.
#[derive(Clone, Debug)]
pub struct NonConservingSplit {
    tag: BasisTag,
    l_a: usize,
    max_particles: usize,
    offsets: Vec<usize>,
    totals: Vec<usize>,
    a_of: Vec<usize>,
    b_of: Vec<usize>,
    local_a: LocalBasis,
    local_b: LocalBasis,
    blocks: Vec<NumberBlock>,
}

pub fn sector_blocks_for_nonconserving(
    bases: &[FockBasis],
    l_a: usize,
) -> Result<NonConservingSplit> {
    let first = bases
        .first()
        .ok_or_else(|| Error::InconsistentBlocks("no bases given".into()))?;
    let sites = first.sites();
    for (n, b) in bases.iter().enumerate() {
        if b.sites() != sites || b.particles() != n {
            return Err(Error::InconsistentBlocks(format!(
                "basis #{n} has L={} N={}, expected L={sites} N={n}",
                b.sites(),
                b.particles()
            )));
        }
    }
    let max_particles = bases.len() - 1;
    let splits = bases
        .iter()
        .map(|b| split(b, l_a))
        .collect::<Result<Vec<_>>>()?;
    let l_b = sites - l_a;
    let local_a = LocalBasis::new(l_a, max_particles)?;
    let local_b = LocalBasis::new(l_b, max_particles)?;

    let mut offsets = Vec::with_capacity(bases.len());
    let mut totals = Vec::new();
    let mut a_of = Vec::new();
    let mut b_of = Vec::new();
    let mut by_nb: Vec<Vec<usize>> = vec![Vec::new(); max_particles + 1];
    for (n, s) in splits.iter().enumerate() {
        offsets.push(a_of.len());
        for i in 0..s.dim() {
            let c = s.sector_of(i);
            by_nb[c.n_b].push(a_of.len());
            a_of.push(local_a.global(c.n_a, c.a_index));
            b_of.push(local_b.global(c.n_b, c.b_index));
            totals.push(n);
        }
    }

    let mut blocks: Vec<NumberBlock> = by_nb
        .into_iter()
        .enumerate()
        .map(|(n_b, members)| NumberBlock {
            n_b,
            dim_a: (0..=max_particles - n_b).map(|n_a| local_a.dims[n_a]).sum(),
            dim_b: local_b.dims[n_b],
            members,
        })
        .collect();
    blocks.sort_by(|x, y| y.dim_a.cmp(&x.dim_a).then(x.n_b.cmp(&y.n_b)));
    for b in &blocks {
        if b.dim() != b.members.len() {
            return Err(Error::InconsistentBlocks(format!(
                "block n_B={} has {} states but dim_A*dim_B = {}",
                b.n_b,
                b.members.len(),
                b.dim()
            )));
        }
    }

    Ok(NonConservingSplit {
        tag: BasisTag::FockTruncated {
            sites,
            max_particles,
        },
        l_a,
        max_particles,
        offsets,
        totals,
        a_of,
        b_of,
        local_a,
        local_b,
        blocks,
    })
}

impl NonConservingSplit {
    pub fn max_particles(&self) -> usize {
        self.max_particles
    }

    /// Blocks ordered by decreasing A-side dimension, ties by `n_B` ascending.
    pub fn blocks(&self) -> &[NumberBlock] {
        &self.blocks
    }

    pub fn global_index(&self, n: usize, local: usize) -> usize {
        self.offsets[n] + local
    }

    /// Total particle number of a global index.
    pub fn total_of(&self, index: usize) -> usize {
        self.totals[index]
    }
}

impl Bipartition for NonConservingSplit {
    fn tag(&self) -> &BasisTag {
        &self.tag
    }

    fn l_a(&self) -> usize {
        self.l_a
    }

    fn dim(&self) -> usize {
        self.a_of.len()
    }

    fn side_dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.local_a.len(),
            Side::B => self.local_b.len(),
        }
    }

    fn local_index(&self, index: usize, side: Side) -> usize {
        match side {
            Side::A => self.a_of[index],
            Side::B => self.b_of[index],
        }
    }

    fn local_particles(&self, local: usize, side: Side) -> Option<usize> {
        Some(match side {
            Side::A => self.local_a.particles[local],
            Side::B => self.local_b.particles[local],
        })
    }
}
