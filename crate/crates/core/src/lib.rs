//! Exact-diagonalization toolkit for entropy distillation in bipartite
//! bosonic and qubit systems.
//!
//! The crate builds occupation-number bases and Hamiltonians, evolves
//! density matrices under piecewise-constant controls, computes the
//! minimal subsystem entropy reachable under particle-conserving unitaries,
//! and runs a greedy bang-bang search that steers the subsystem toward
//! that minimum.

pub mod bound;
pub mod error;
pub mod fock;
pub mod greedy;
pub mod linalg;
pub mod majorization;
pub mod operators;
pub mod oracle;
pub mod random;
pub mod state;
pub mod system;

pub use bound::{
    lower_bound, lower_bound_nonconserving, lower_bound_qubits, plan_sectors, BoundReport,
    SectorEntry, SectorPlan,
};
pub use error::{Error, Result};
pub use fock::{
    enumerate_basis, fock_dimension, sector_blocks_for_nonconserving, split, BasisTag,
    Bipartition, BipartiteSplit, FockBasis, NonConservingSplit, NumberBlock, OccupationVector,
    QubitSplit, SectorCoord, Side,
};
pub use greedy::{
    greedy_distill, greedy_distill_random_dt, replay_path, timekeeping_robustness, ControlPath,
    ControlSet, ExperimentRecord, GreedyConfig, Objective, PathStep, Provenance, StepRecord,
    TimekeepingPoint,
};
pub use linalg::{CMatrix, C64};
pub use operators::{
    build_bose_hubbard, build_control, build_ising, build_ising_control, build_number_ops,
    HermitianOperator, ModelKind, ModelSpec, DEFAULT_MAX_QUBITS,
};
pub use state::{
    evolve, expected_number, imperfect_timekeeping_evolve, mutual_information, partial_trace,
    propagator, purity, shannon_entropy, thermal_state, von_neumann_entropy, DensityMatrix,
    LogBase, Propagator, Spectrum,
};
pub use system::ControlledSystem;
