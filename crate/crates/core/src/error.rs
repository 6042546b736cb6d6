use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a lattice needs at least one site")]
    NoSites,

    #[error("bipartition point l_A = {l_a} must lie in 1..={max} for {sites} sites")]
    SplitOutOfRange { l_a: usize, sites: usize, max: usize },

    #[error("basis dimension overflows usize for {sites} sites and {particles} particles")]
    DimensionOverflow { sites: usize, particles: usize },

    #[error("model/basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is tagged {found} but the operation expects {expected}")]
    TagMismatch { expected: String, found: String },

    #[error("{what} size {requested} exceeds the limit {limit}")]
    SizeLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("dimension {dim} is not divisible by subsystem dimension {d_a}")]
    NotDivisible { dim: usize, d_a: usize },

    #[error("inconsistent block structure: {0}")]
    InconsistentBlocks(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("control set: {0}")]
    InvalidControlSet(String),
}
