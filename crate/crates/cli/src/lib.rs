//! Configuration-driven experiment runner for `qdistill-core`.

pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::{ExperimentConfig, Mode};
pub use runner::{execute, write_outcome, Overrides, RunOutcome};
