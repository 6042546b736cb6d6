//! Executes an [`ExperimentConfig`] and renders its result files.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use qdistill_core::{
    greedy_distill, greedy_distill_random_dt, replay_path, timekeeping_robustness, ControlPath, ControlledSystem,
    DensityMatrix, ExperimentRecord, GreedyConfig, LogBase, Side, TimekeepingPoint,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Mode, SweepAxis};
use crate::output::{self, Summary, SweepRow};

/// `S_B − bound` at or below which a run counts as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 0.05;

/// A named file body, not yet written.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub bytes: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub summary: Summary,
    /// Main time series (the replayed one in replay mode).
    pub record: Option<ExperimentRecord>,
    /// Search run that produced the path, in replay mode.
    pub source_record: Option<ExperimentRecord>,
    pub path: Option<ControlPath>,
    pub sweep: Vec<SweepRow>,
    pub timekeeping: Vec<TimekeepingPoint>,
    pub artifacts: Vec<Artifact>,
}

impl RunOutcome {
    pub fn artifact(&self, suffix: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.file_name.ends_with(suffix))
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub base: Option<LogBase>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(seed) = self.seed {
            cfg.greedy.seed = seed;
        }
        if let Some(base) = self.base {
            cfg.base = base;
        }
    }
}

fn thermal(system: &ControlledSystem, beta: f64) -> Result<DensityMatrix> {
    system
        .thermal_state(beta)
        .with_context(|| format!("thermal_state failed at beta = {beta}"))
}

fn first_converged(record: &ExperimentRecord) -> Option<usize> {
    let bound = record.bound.bound_entropy;
    record
        .series
        .iter()
        .position(|r| r.s_b - bound <= CONVERGENCE_TOLERANCE)
}

fn summarize(
    cfg: &ExperimentConfig,
    greedy: &GreedyConfig,
    record: &ExperimentRecord,
    steps: usize,
    started: Instant,
) -> Summary {
    let first = record.initial();
    let last = record.last();
    Summary {
        name: cfg.name.clone(),
        mode: cfg.mode.as_str().into(),
        final_entropy: last.s_b,
        bound: record.bound.bound_entropy,
        difference: record.difference(),
        initial_entropy: first.s_b,
        final_n_b: last.n_b,
        initial_n_b: first.n_b,
        optimal_n_b: record.bound.optimal_nb.unwrap_or(f64::NAN),
        total_time_steps: steps,
        delta_t: greedy.dt,
        total_time: last.t,
        beta: cfg.beta,
        objective: greedy.objective.to_string(),
        log_base: cfg.base.to_string(),
        seed: cfg.greedy.seed,
        steps_to_converge: first_converged(record),
        max_relative_error: None,
        max_difference: None,
        wall_seconds: started.elapsed().as_secs_f64(),
    }
}

fn distill(system: &ControlledSystem, cfg: &ExperimentConfig, greedy: &GreedyConfig, beta: f64) -> Result<(ControlPath, ExperimentRecord)> {
    let rho0 = thermal(system, beta)?;
    let (path, record) = if cfg.mode == Mode::RandomDt {
        greedy_distill_random_dt(system, &rho0, &cfg.controls, greedy).context("greedy_distill_random_dt failed")?
    } else {
        greedy_distill(system, &rho0, &cfg.controls, greedy).context("greedy_distill failed")?
    };
    Ok((path.found_at(beta), record))
}

fn sweep_point(cfg: &ExperimentConfig, axis: SweepAxis, value: f64) -> Result<SweepRow> {
    let mut point = cfg.clone();
    match axis {
        SweepAxis::Beta => point.beta = value,
        SweepAxis::Hopping => point.model.hopping = value,
        SweepAxis::Interaction => point.model.interaction = value,
        SweepAxis::Dt => point.greedy.dt = value,
    }
    let greedy = point.greedy_config()?;
    let system = ControlledSystem::from_spec(&point.model).context("building the model")?;
    let (_, record) = distill(&system, &point, &greedy, point.beta)
        .with_context(|| format!("sweep point {} = {value}", axis.as_str()))?;
    Ok(SweepRow {
        value,
        initial_entropy: record.initial().s_b,
        final_entropy: record.final_entropy(),
        bound: record.bound.bound_entropy,
        initial_n_b: record.initial().n_b,
        final_n_b: record.last().n_b,
    })
}

/// Runs the experiment in memory; nothing is written to disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let started = Instant::now();
    let greedy = cfg.greedy_config()?;
    let system = ControlledSystem::from_spec(&cfg.model).context("building the model")?;
    let name = &cfg.name;
    let mut artifacts = Vec::new();
    let mut outcome_record = None;
    let mut source_record = None;
    let mut outcome_path = None;
    let mut sweep = Vec::new();
    let mut timekeeping = Vec::new();

    let summary = match cfg.mode {
        Mode::Bound => {
            let rho0 = thermal(&system, cfg.beta)?;
            let report = system.bound(&rho0, cfg.base).context("lower_bound failed")?;
            let rho_b = system.reduced(&rho0, Side::B).context("partial_trace failed")?;
            let s_b = qdistill_core::von_neumann_entropy(&rho_b, cfg.base);
            let n_b = system.number(&rho_b, Side::B)?.unwrap_or(f64::NAN);
            Summary {
                name: name.clone(),
                mode: cfg.mode.as_str().into(),
                final_entropy: s_b,
                bound: report.bound_entropy,
                difference: s_b - report.bound_entropy,
                initial_entropy: s_b,
                final_n_b: n_b,
                initial_n_b: n_b,
                optimal_n_b: report.optimal_nb.unwrap_or(f64::NAN),
                total_time_steps: 0,
                delta_t: greedy.dt,
                total_time: 0.0,
                beta: cfg.beta,
                objective: greedy.objective.to_string(),
                log_base: cfg.base.to_string(),
                seed: cfg.greedy.seed,
                steps_to_converge: None,
                max_relative_error: None,
                max_difference: None,
                wall_seconds: started.elapsed().as_secs_f64(),
            }
        }
        Mode::Distill | Mode::RandomDt => {
            let (path, record) = distill(&system, cfg, &greedy, cfg.beta)?;
            let s = summarize(cfg, &greedy, &record, path.steps.len(), started);
            outcome_path = Some(path);
            outcome_record = Some(record);
            s
        }
        Mode::Replay => {
            let source_beta = cfg.replay.as_ref().expect("validated").source_beta;
            let (path, found) = distill(&system, cfg, &greedy, source_beta)?;
            let rho0 = thermal(&system, cfg.beta)?;
            let record = replay_path(&system, &rho0, &path).context("replay_path failed")?;
            let s = summarize(cfg, &greedy, &record, path.steps.len(), started);
            artifacts.push(Artifact {
                file_name: format!("{name}.source.series.csv"),
                bytes: output::series_csv(&found)?,
            });
            source_record = Some(found);
            outcome_path = Some(path);
            outcome_record = Some(record);
            s
        }
        Mode::Timekeeping => {
            let tk = cfg.timekeeping.as_ref().expect("validated");
            let (path, record) = distill(&system, cfg, &greedy, cfg.beta)?;
            let rho0 = thermal(&system, cfg.beta)?;
            timekeeping = timekeeping_robustness(&system, &rho0, &path, &tk.sigmas, tk.points)
                .context("timekeeping_robustness failed")?;
            let mut s = summarize(cfg, &greedy, &record, path.steps.len(), started);
            s.max_relative_error = timekeeping.iter().map(|p| p.relative_error).reduce(f64::max);
            artifacts.push(Artifact {
                file_name: format!("{name}.timekeeping.csv"),
                bytes: output::timekeeping_csv(&timekeeping)?,
            });
            outcome_path = Some(path);
            outcome_record = Some(record);
            s.wall_seconds = started.elapsed().as_secs_f64();
            s
        }
        Mode::Sweep => {
            let sw = cfg.sweep.as_ref().expect("validated");
            sweep = sw
                .values
                .par_iter()
                .map(|&v| sweep_point(cfg, sw.axis, v))
                .collect::<Result<Vec<_>>>()?;
            artifacts.push(Artifact {
                file_name: format!("{name}.sweep.csv"),
                bytes: output::sweep_csv(sw.axis.as_str(), &sweep)?,
            });
            Summary {
                name: name.clone(),
                mode: cfg.mode.as_str().into(),
                final_entropy: f64::NAN,
                bound: f64::NAN,
                difference: f64::NAN,
                initial_entropy: f64::NAN,
                final_n_b: f64::NAN,
                initial_n_b: f64::NAN,
                optimal_n_b: f64::NAN,
                total_time_steps: greedy.steps,
                delta_t: greedy.dt,
                total_time: greedy.steps as f64 * greedy.dt,
                beta: cfg.beta,
                objective: greedy.objective.to_string(),
                log_base: cfg.base.to_string(),
                seed: cfg.greedy.seed,
                steps_to_converge: None,
                max_relative_error: None,
                max_difference: sweep.iter().map(SweepRow::difference).reduce(f64::max),
                wall_seconds: started.elapsed().as_secs_f64(),
            }
        }
    };

    if let Some(record) = &outcome_record {
        artifacts.push(Artifact {
            file_name: format!("{name}.series.csv"),
            bytes: output::series_csv(record)?,
        });
    }
    if let Some(path) = &outcome_path {
        artifacts.push(Artifact {
            file_name: format!("{name}.path.csv"),
            bytes: output::path_csv(path)?,
        });
    }
    artifacts.push(Artifact {
        file_name: format!("{name}.summary.toml"),
        bytes: output::summary_toml(&summary)?,
    });

    Ok(RunOutcome {
        config: cfg.clone(),
        summary,
        record: outcome_record,
        source_record,
        path: outcome_path,
        sweep,
        timekeeping,
        artifacts,
    })
}

/// Writes every artifact atomically into `dir`.
pub fn write_outcome(outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    outcome
        .artifacts
        .iter()
        .map(|a| {
            let p = dir.join(&a.file_name);
            output::write_atomic(&p, &a.bytes)?;
            Ok(p)
        })
        .collect()
}
