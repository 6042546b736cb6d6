//! Drift, control and number operators as dense Hermitian matrices.
//!
//! Conventions: `b|n⟩ = √n|n−1⟩`, `b†|n⟩ = √(n+1)|n+1⟩`, open boundaries.
//! The control term enters with `+γJ` on the bond `(l_A, l_A+1)`, so at
//! `γ = 1` the drift's `−J` hopping across the cut is switched off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{BasisTag, Bipartition, BipartiteSplit, FockBasis, OccupationVector, Side};
use crate::linalg::{hermitian_deviation, max_abs_diff, CMatrix, C64};
use crate::state::Spectrum;

/// Largest qubit register the Ising builders accept by default.
pub const DEFAULT_MAX_QUBITS: usize = 12;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
    tag: BasisTag,
}

impl HermitianOperator {
    /// Wraps a matrix after checking Hermiticity elementwise to 1e-12.
    pub fn new(mat: CMatrix, tag: BasisTag) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let deviation = hermitian_deviation(&mat);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { mat, tag })
    }

    pub fn zeros(dim: usize, tag: BasisTag) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
            tag,
        }
    }

    pub fn from_real_diagonal(diag: &[f64], tag: BasisTag) -> Self {
        let n = diag.len();
        let mut mat = CMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            mat[(i, i)] = C64::new(d, 0.0);
        }
        Self { mat, tag }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn tag(&self) -> &BasisTag {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mat: &self.mat * C64::new(factor, 0.0),
            tag: self.tag.clone(),
        }
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            mat: &self.mat + &other.mat,
            tag: self.tag.clone(),
        })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            mat: &self.mat - &other.mat,
            tag: self.tag.clone(),
        })
    }

    /// Largest elementwise magnitude of `[self, other]`.
    pub fn commutator_norm(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let ab = &self.mat * &other.mat;
        let ba = &other.mat * &self.mat;
        Ok(max_abs_diff(&ab, &ba))
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(self)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if self.tag != other.tag {
            return Err(Error::TagMismatch {
                expected: self.tag.to_string(),
                found: other.tag.to_string(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    BoseHubbard,
    Ising,
}

/// Model parameters plus the cut `l_A` (sites `1..=l_A` form A).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub sites: usize,
    /// Total boson number; ignored for Ising.
    #[serde(default)]
    pub particles: usize,
    /// Hopping (Bose-Hubbard) or σˣσˣ coupling (Ising) strength `J`.
    pub hopping: f64,
    /// On-site interaction `U`; ignored for Ising.
    #[serde(default)]
    pub interaction: f64,
    pub l_a: usize,
}

impl ModelSpec {
    pub fn bose_hubbard(sites: usize, particles: usize, hopping: f64, interaction: f64, l_a: usize) -> Self {
        Self {
            kind: ModelKind::BoseHubbard,
            sites,
            particles,
            hopping,
            interaction,
            l_a,
        }
    }

    pub fn ising(sites: usize, coupling: f64, l_a: usize) -> Self {
        Self {
            kind: ModelKind::Ising,
            sites,
            particles: 0,
            hopping: coupling,
            interaction: 0.0,
            l_a,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(Error::NoSites);
        }
        if self.l_a == 0 || self.l_a >= self.sites {
            return Err(Error::SplitOutOfRange {
                l_a: self.l_a,
                sites: self.sites,
                max: self.sites.saturating_sub(1),
            });
        }
        if !self.hopping.is_finite() || !self.interaction.is_finite() {
            return Err(Error::InvalidParameter("J and U must be finite".into()));
        }
        Ok(())
    }

    fn expect_kind(&self, kind: ModelKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::BasisMismatch(format!(
                "expected a {kind:?} model, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    fn check_basis(&self, basis: &FockBasis) -> Result<()> {
        self.expect_kind(ModelKind::BoseHubbard)?;
        if basis.sites() != self.sites || basis.particles() != self.particles {
            return Err(Error::BasisMismatch(format!(
                "model has L={} N={} but basis has L={} N={}",
                self.sites,
                self.particles,
                basis.sites(),
                basis.particles()
            )));
        }
        Ok(())
    }
}

/// Adds `amplitude · b†_to b_from` acting on every basis ket.
fn add_hop(mat: &mut CMatrix, basis: &FockBasis, from: usize, to: usize, amplitude: f64) {
    for (col, ket) in basis.states().iter().enumerate() {
        let occ = ket.as_slice();
        if occ[from] == 0 {
            continue;
        }
        let mut next = occ.to_vec();
        let mut factor = (next[from] as f64).sqrt();
        next[from] -= 1;
        factor *= (next[to] as f64 + 1.0).sqrt();
        next[to] += 1;
        let row = basis
            .index_of(&OccupationVector::new(next))
            .expect("hopping preserves particle number");
        mat[(row, col)] += C64::new(amplitude * factor, 0.0);
    }
}

/// `H₀ = −J Σ_{i<L} (b†_i b_{i+1} + h.c.) + (U/2) Σ_i n_i(n_i − 1)`.
pub fn build_bose_hubbard(spec: &ModelSpec, basis: &FockBasis) -> Result<HermitianOperator> {
    spec.check_basis(basis)?;
    let dim = basis.dim();
    let mut mat = CMatrix::zeros(dim, dim);
    for bond in 0..spec.sites.saturating_sub(1) {
        add_hop(&mut mat, basis, bond + 1, bond, -spec.hopping);
        add_hop(&mut mat, basis, bond, bond + 1, -spec.hopping);
    }
    for (i, ket) in basis.states().iter().enumerate() {
        let onsite: usize = ket.as_slice().iter().map(|&n| n * n.saturating_sub(1)).sum();
        mat[(i, i)] += C64::new(0.5 * spec.interaction * onsite as f64, 0.0);
    }
    HermitianOperator::new(mat, basis.tag())
}

/// `H_c = γ J (b†_{l_A} b_{l_A+1} + h.c.)` on the cut bond.
pub fn build_control(spec: &ModelSpec, basis: &FockBasis, gamma: f64) -> Result<HermitianOperator> {
    spec.check_basis(basis)?;
    if spec.l_a == 0 || spec.l_a >= spec.sites {
        return Err(Error::SplitOutOfRange {
            l_a: spec.l_a,
            sites: spec.sites,
            max: spec.sites.saturating_sub(1),
        });
    }
    let dim = basis.dim();
    let mut mat = CMatrix::zeros(dim, dim);
    let amplitude = gamma * spec.hopping;
    // 0-based sites l_A-1 and l_A
    let (left, right) = (spec.l_a - 1, spec.l_a);
    add_hop(&mut mat, basis, right, left, amplitude);
    add_hop(&mut mat, basis, left, right, amplitude);
    HermitianOperator::new(mat, basis.tag())
}

/// Diagonal `n̂_A` and `n̂_B` in the full basis.
pub fn build_number_ops(
    basis: &FockBasis,
    split: &BipartiteSplit,
) -> Result<(HermitianOperator, HermitianOperator)> {
    if split.tag() != &basis.tag() {
        return Err(Error::TagMismatch {
            expected: basis.tag().to_string(),
            found: split.tag().to_string(),
        });
    }
    let n_a: Vec<f64> = (0..basis.dim())
        .map(|i| split.sector_of(i).n_a as f64)
        .collect();
    let n_b: Vec<f64> = (0..basis.dim())
        .map(|i| split.sector_of(i).n_b as f64)
        .collect();
    Ok((
        HermitianOperator::from_real_diagonal(&n_a, basis.tag()),
        HermitianOperator::from_real_diagonal(&n_b, basis.tag()),
    ))
}

/// Diagonal of the reduced `n̂_B` on the B-local space, `⊕_k k·I_{d_B,k}`.
pub fn reduced_number_diagonal<P: Bipartition>(split: &P, side: Side) -> Option<Vec<f64>> {
    (0..split.side_dim(side))
        .map(|j| split.local_particles(j, side).map(|n| n as f64))
        .collect()
}

fn check_qubits(spec: &ModelSpec, max_qubits: usize) -> Result<usize> {
    spec.expect_kind(ModelKind::Ising)?;
    if spec.sites == 0 {
        return Err(Error::NoSites);
    }
    if spec.sites > max_qubits {
        return Err(Error::SizeLimit {
            what: "qubit register",
            requested: spec.sites,
            limit: max_qubits,
        });
    }
    Ok(1usize << spec.sites)
}

/// Bit of qubit `site` (0-based, site 0 most significant).
fn qubit_bit(sites: usize, site: usize) -> usize {
    1 << (sites - 1 - site)
}

/// `H₀ = −J Σ_{i<L} σˣ_i σˣ_{i+1} − Σ_i σᶻ_i`, with `|0⟩` the `σᶻ = +1` state.
pub fn build_ising(spec: &ModelSpec) -> Result<HermitianOperator> {
    build_ising_with_limit(spec, DEFAULT_MAX_QUBITS)
}

pub fn build_ising_with_limit(spec: &ModelSpec, max_qubits: usize) -> Result<HermitianOperator> {
    let dim = check_qubits(spec, max_qubits)?;
    let l = spec.sites;
    let mut mat = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let ups = (0..l).filter(|&s| idx & qubit_bit(l, s) == 0).count() as f64;
        let downs = l as f64 - ups;
        mat[(idx, idx)] += C64::new(-(ups - downs), 0.0);
        for bond in 0..l.saturating_sub(1) {
            let flipped = idx ^ qubit_bit(l, bond) ^ qubit_bit(l, bond + 1);
            mat[(flipped, idx)] += C64::new(-spec.hopping, 0.0);
        }
    }
    HermitianOperator::new(mat, BasisTag::Qubits { sites: l })
}

/// `H_c = γ J σˣ_{l_A} σˣ_{l_A+1}`.
pub fn build_ising_control(spec: &ModelSpec, gamma: f64) -> Result<HermitianOperator> {
    let dim = check_qubits(spec, DEFAULT_MAX_QUBITS)?;
    let l = spec.sites;
    if spec.l_a == 0 || spec.l_a >= l {
        return Err(Error::SplitOutOfRange {
            l_a: spec.l_a,
            sites: l,
            max: l.saturating_sub(1),
        });
    }
    let mask = qubit_bit(l, spec.l_a - 1) ^ qubit_bit(l, spec.l_a);
    let mut mat = CMatrix::zeros(dim, dim);
    for idx in 0..dim {
        mat[(idx ^ mask, idx)] += C64::new(gamma * spec.hopping, 0.0);
    }
    HermitianOperator::new(mat, BasisTag::Qubits { sites: l })
}
