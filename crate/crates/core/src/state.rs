//! Density matrices and the observables computed from them.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{BasisTag, Bipartition, Side};
use crate::linalg::{eigh, eigvalsh_desc, gemm, hermitian_deviation, hermitize, CMatrix, Op, C64};
use crate::operators::HermitianOperator;

/// Eigenvalues at or below this are dropped from entropy sums.
pub const CLIP_FLOOR: f64 = 1e-12;

/// Grid size for the Gaussian timekeeping quadrature.
pub const DEFAULT_QUADRATURE_POINTS: usize = 51;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const NEGATIVITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "nat", alias = "natural", alias = "e")]
    Natural,
    #[serde(rename = "two", alias = "2")]
    Two,
}

impl LogBase {
    /// Converts a natural-log quantity into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "nat",
            LogBase::Two => "2",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nat" | "natural" | "e" => Ok(LogBase::Natural),
            "2" | "two" => Ok(LogBase::Two),
            other => Err(Error::InvalidParameter(format!(
                "unknown log base `{other}` (use nat or 2)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    tag: BasisTag,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-10) and
    /// positivity (eigenvalues ≥ −1e-10).
    pub fn new(mat: CMatrix, tag: BasisTag) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let dev = hermitian_deviation(&mat);
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = eigvalsh_desc(&mat).last().copied().unwrap_or(0.0);
        if min < -NEGATIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { mat, tag })
    }

    /// Skips validation; the matrix is symmetrized to remove round-off.
    pub(crate) fn from_trusted(mat: CMatrix, tag: BasisTag) -> Self {
        Self {
            mat: hermitize(&mat),
            tag,
        }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[C64], tag: BasisTag) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = DVector::from_iterator(psi.len(), psi.iter().map(|z| z / norm));
        Ok(Self::from_trusted(&v * v.adjoint(), tag))
    }

    pub fn diagonal(probs: &[f64], tag: BasisTag) -> Result<Self> {
        let n = probs.len();
        let mut mat = CMatrix::zeros(n, n);
        for (i, &p) in probs.iter().enumerate() {
            mat[(i, i)] = C64::new(p, 0.0);
        }
        Self::new(mat, tag)
    }

    pub fn maximally_mixed(dim: usize, tag: BasisTag) -> Self {
        let mut mat = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            mat[(i, i)] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self { mat, tag }
    }

    /// Convex (or general real-linear) combination of states on one space.
    pub fn combine(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidState("empty combination".into()))?
            .1;
        let mut mat = CMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in terms {
            check_same_space(first, rho)?;
            mat += &rho.mat * C64::new(*w, 0.0);
        }
        Self::new(mat, first.tag.clone())
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

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh_desc(&self.mat)
    }

    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// `Tr(ρ·O)` for a Hermitian observable.
    pub fn expectation(&self, op: &HermitianOperator) -> Result<f64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        let n = self.dim();
        let o = op.matrix();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.mat[(i, j)] * o[(j, i)];
            }
        }
        Ok(acc.re)
    }
}

fn check_same_space(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    if a.tag != b.tag {
        return Err(Error::TagMismatch {
            expected: a.tag.to_string(),
            found: b.tag.to_string(),
        });
    }
    Ok(())
}

/// Cached eigen-decomposition of a Hermitian generator.
#[derive(Clone, Debug)]
pub struct Spectrum {
    values: DVector<f64>,
    vectors: CMatrix,
    tag: BasisTag,
    hash: u64,
}

impl Spectrum {
    pub fn of(h: &HermitianOperator) -> Self {
        let (values, vectors) = eigh(h.matrix());
        let mut hasher = DefaultHasher::new();
        for z in h.matrix().iter() {
            z.re.to_bits().hash(&mut hasher);
            z.im.to_bits().hash(&mut hasher);
        }
        Self {
            values,
            vectors,
            tag: h.tag().clone(),
            hash: hasher.finish(),
        }
    }

    /// Ascending eigenvalues.
    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn tag(&self) -> &BasisTag {
        &self.tag
    }

    /// Identifier of the generator this spectrum came from.
    pub fn generator_hash(&self) -> u64 {
        self.hash
    }

    /// `V · diag(f(λ_j)) · V†`
    fn rebuild(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        crate::linalg::spectral_map(&self.values, &self.vectors, f)
    }

    /// `exp(−i H t)` built from the spectrum.
    pub fn propagator(&self, dt: f64) -> Propagator {
        let mat = self.rebuild(|l| C64::new(0.0, -l * dt).exp());
        let mut hasher = DefaultHasher::new();
        self.hash.hash(&mut hasher);
        dt.to_bits().hash(&mut hasher);
        Propagator {
            mat,
            generator_hash: hasher.finish(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Propagator {
    mat: CMatrix,
    generator_hash: u64,
}

impl Propagator {
    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Hash of `(H, δt)`.
    pub fn generator_hash(&self) -> u64 {
        self.generator_hash
    }

    /// Largest elementwise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = gemm(&self.mat, Op::Adjoint, &self.mat, Op::Plain);
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - C64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    pub fn compose(&self, other: &Propagator) -> Propagator {
        let mut hasher = DefaultHasher::new();
        self.generator_hash.hash(&mut hasher);
        other.generator_hash.hash(&mut hasher);
        Propagator {
            mat: gemm(&self.mat, Op::Plain, &other.mat, Op::Plain),
            generator_hash: hasher.finish(),
        }
    }
}

/// `e^{−βH}/Z`, evaluated on the spectrum shifted by its minimum.
pub fn thermal_state(h: &HermitianOperator, beta: f64) -> Result<DensityMatrix> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "inverse temperature must be finite and non-negative, got {beta}"
        )));
    }
    let spec = h.spectrum();
    let e_min = spec.values.iter().copied().fold(f64::INFINITY, f64::min);
    let z: f64 = spec.values.iter().map(|&e| (-beta * (e - e_min)).exp()).sum();
    let mat = spec.rebuild(|e| C64::new((-beta * (e - e_min)).exp() / z, 0.0));
    Ok(DensityMatrix::from_trusted(mat, h.tag().clone()))
}

pub fn propagator(h: &HermitianOperator, dt: f64) -> Propagator {
    h.spectrum().propagator(dt)
}

/// `U ρ U†`
pub fn evolve(rho: &DensityMatrix, u: &Propagator) -> Result<DensityMatrix> {
    if u.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: u.dim(),
        });
    }
    let out = crate::linalg::conjugate(&u.mat, &rho.mat);
    Ok(DensityMatrix::from_trusted(out, rho.tag.clone()))
}

/// Reduced state on `keep`, tracing out the other side.
pub fn partial_trace<P: Bipartition + ?Sized>(
    rho: &DensityMatrix,
    split: &P,
    keep: Side,
) -> Result<DensityMatrix> {
    if rho.tag() != split.tag() || rho.dim() != split.dim() {
        return Err(Error::TagMismatch {
            expected: split.tag().to_string(),
            found: rho.tag().to_string(),
        });
    }
    let traced = keep.other();
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); split.side_dim(traced)];
    for i in 0..split.dim() {
        groups[split.local_index(i, traced)].push((i, split.local_index(i, keep)));
    }
    let k = split.side_dim(keep);
    let mut out = CMatrix::zeros(k, k);
    for group in &groups {
        for &(i, ki) in group {
            for &(j, kj) in group {
                out[(ki, kj)] += rho.mat[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_trusted(out, split.reduced_tag(keep)))
}

/// `−Σ p log p` over entries above the clip floor.
pub fn shannon_entropy(probs: &[f64], base: LogBase) -> f64 {
    let nats: f64 = probs
        .iter()
        .filter(|&&p| p > CLIP_FLOOR)
        .map(|&p| -p * p.ln())
        .sum();
    base.from_nats(nats)
}

pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    shannon_entropy(&rho.eigenvalues(), base)
}

/// `Tr ρ²`
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.mat.iter().map(|z| z.norm_sqr()).sum()
}

/// `S_A + S_B − S_AB`
pub fn mutual_information<P: Bipartition + ?Sized>(
    rho: &DensityMatrix,
    split: &P,
    base: LogBase,
) -> Result<f64> {
    let s_a = von_neumann_entropy(&partial_trace(rho, split, Side::A)?, base);
    let s_b = von_neumann_entropy(&partial_trace(rho, split, Side::B)?, base);
    Ok(s_a + s_b - von_neumann_entropy(rho, base))
}

/// `⟨n̂_side⟩` from either the full state or the reduced state of `side`.
pub fn expected_number<P: Bipartition + ?Sized>(
    rho: &DensityMatrix,
    split: &P,
    side: Side,
) -> Result<f64> {
    let no_number = || Error::InvalidParameter("model has no particle number".into());
    if rho.tag() == split.tag() {
        let mut acc = 0.0;
        for i in 0..rho.dim() {
            let n = split
                .local_particles(split.local_index(i, side), side)
                .ok_or_else(no_number)?;
            acc += rho.mat[(i, i)].re * n as f64;
        }
        Ok(acc)
    } else if rho.tag() == &split.reduced_tag(side) {
        let mut acc = 0.0;
        for j in 0..rho.dim() {
            let n = split.local_particles(j, side).ok_or_else(no_number)?;
            acc += rho.mat[(j, j)].re * n as f64;
        }
        Ok(acc)
    } else {
        Err(Error::TagMismatch {
            expected: split.tag().to_string(),
            found: rho.tag().to_string(),
        })
    }
}

/// Symmetric grid on `[τ − 4σ, τ + 4σ]` with normalized Gaussian weights.
fn timekeeping_quadrature(tau: f64, sigma: f64, points: usize) -> Vec<(f64, f64)> {
    if sigma == 0.0 {
        return vec![(tau, 1.0)];
    }
    let half = (points - 1) / 2;
    let step = 4.0 * sigma / half as f64;
    let raw: Vec<(f64, f64)> = (0..points)
        .map(|m| {
            let offset = (m as f64 - half as f64) * step;
            (tau + offset, (-offset * offset / (2.0 * sigma * sigma)).exp())
        })
        .collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    raw.into_iter().map(|(t, w)| (t, w / total)).collect()
}

/// Gaussian-jittered evolution `∫ dt g(t; τ, σ) e^{−iHt} ρ e^{iHt}`.
pub fn imperfect_timekeeping_evolve(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    tau: f64,
    sigma: f64,
    points: usize,
) -> Result<DensityMatrix> {
    imperfect_timekeeping_with_spectrum(rho, &h.spectrum(), tau, sigma, points)
}

/// As [`imperfect_timekeeping_evolve`], reusing a precomputed spectrum.
///
/// In the generator's eigenbasis the channel multiplies `ρ̃_ij` by
/// `Σ_m w_m exp(−i(λ_i − λ_j) t_m)`, which is exact for the quadrature.
pub fn imperfect_timekeeping_with_spectrum(
    rho: &DensityMatrix,
    spectrum: &Spectrum,
    tau: f64,
    sigma: f64,
    points: usize,
) -> Result<DensityMatrix> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "timekeeping spread must be >= 0, got {sigma}"
        )));
    }
    if points < 3 || points.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "quadrature needs an odd number of points >= 3, got {points}"
        )));
    }
    if spectrum.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: spectrum.dim(),
        });
    }
    let nodes = timekeeping_quadrature(tau, sigma, points);
    let v = &spectrum.vectors;
    let vr = gemm(v, Op::Adjoint, &rho.mat, Op::Plain);
    let mut inner = gemm(&vr, Op::Plain, v, Op::Plain);
    let n = rho.dim();
    let lambda = &spectrum.values;
    for i in 0..n {
        for j in 0..n {
            let gap = lambda[i] - lambda[j];
            let factor: C64 = nodes
                .iter()
                .map(|&(t, w)| C64::new(0.0, -gap * t).exp() * w)
                .sum();
            inner[(i, j)] *= factor;
        }
    }
    let out = crate::linalg::conjugate(v, &inner);
    Ok(DensityMatrix::from_trusted(out, rho.tag.clone()))
}
