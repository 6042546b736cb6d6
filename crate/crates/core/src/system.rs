//! A model, its basis and bipartition, and its drift/control pair.

use crate::bound::{lower_bound, lower_bound_qubits, BoundReport};
use crate::error::Result;
use crate::fock::{enumerate_basis, split, BasisTag, Bipartition, BipartiteSplit, FockBasis, QubitSplit, Side};
use crate::operators::{
    build_bose_hubbard, build_control, build_ising, build_ising_control, HermitianOperator, ModelKind,
    ModelSpec,
};
use crate::state::{expected_number, partial_trace, thermal_state, DensityMatrix, LogBase};

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Partition {
    Fock { basis: FockBasis, split: BipartiteSplit },
    Qubits(QubitSplit),
}

/// Everything needed to evolve and analyse one model: `H(γ) = H₀ + γ H_c`.
#[derive(Clone, Debug)]
pub struct ControlledSystem {
    spec: ModelSpec,
    drift: HermitianOperator,
    control: HermitianOperator,
    partition: Partition,
}

impl ControlledSystem {
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        let (drift, control, partition) = match spec.kind {
            ModelKind::BoseHubbard => {
                let basis = enumerate_basis(spec.sites, spec.particles)?;
                let s = split(&basis, spec.l_a)?;
                let drift = build_bose_hubbard(spec, &basis)?;
                let control = build_control(spec, &basis, 1.0)?;
                (drift, control, Partition::Fock { basis, split: s })
            }
            ModelKind::Ising => (
                build_ising(spec)?,
                build_ising_control(spec, 1.0)?,
                Partition::Qubits(QubitSplit::new(spec.sites, spec.l_a)?),
            ),
        };
        Ok(Self {
            spec: spec.clone(),
            drift,
            control,
            partition,
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn drift(&self) -> &HermitianOperator {
        &self.drift
    }

    /// Control term at `γ = 1`.
    pub fn control(&self) -> &HermitianOperator {
        &self.control
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn bipartition(&self) -> &(dyn Bipartition + Sync) {
        match &self.partition {
            Partition::Fock { split, .. } => split,
            Partition::Qubits(q) => q,
        }
    }

    pub fn tag(&self) -> &BasisTag {
        self.drift.tag()
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn conserves_number(&self) -> bool {
        matches!(self.partition, Partition::Fock { .. })
    }

    pub fn hamiltonian(&self, gamma: f64) -> HermitianOperator {
        self.drift
            .sum(&self.control.scaled(gamma))
            .expect("drift and control share a basis")
    }

    /// Thermal state of the drift alone.
    pub fn thermal_state(&self, beta: f64) -> Result<DensityMatrix> {
        thermal_state(&self.drift, beta)
    }

    /// Minimum of `S(ρ_B)` reachable from `rho`.
    pub fn bound(&self, rho: &DensityMatrix, base: LogBase) -> Result<BoundReport> {
        match &self.partition {
            Partition::Fock { split, .. } => lower_bound(rho, split, base),
            Partition::Qubits(q) => lower_bound_qubits(rho, q.d_a(), base),
        }
    }

    pub fn reduced(&self, rho: &DensityMatrix, keep: Side) -> Result<DensityMatrix> {
        partial_trace(rho, self.bipartition(), keep)
    }

    /// `⟨n̂_side⟩`, or `None` for qubit models.
    pub fn number(&self, rho: &DensityMatrix, side: Side) -> Result<Option<f64>> {
        match &self.partition {
            Partition::Fock { split, .. } => expected_number(rho, split, side).map(Some),
            Partition::Qubits(_) => Ok(None),
        }
    }
}
