use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qdistill_cli::config::{ExperimentConfig, Mode};
use qdistill_cli::runner::{execute, write_outcome, Overrides};
use qdistill_cli::{output, presets};
use qdistill_core::LogBase;

#[derive(Parser)]
#[command(name = "qdistill", version, about = "Subsystem entropy distillation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for randomized step lengths
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Logarithm base for entropies: nat or 2
    #[arg(long, global = true)]
    base: Option<LogBase>,
    /// Directory for result files
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML file
    Run { config: PathBuf },
    /// Run a built-in experiment
    Preset { name: String },
    /// List the built-in experiments
    ListPresets,
    /// Report the entropy bound for the state described by a TOML file
    Bound { config: PathBuf },
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out_dir
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn run_one(cli: &Cli, mut cfg: ExperimentConfig) -> Result<()> {
    Overrides {
        seed: cli.seed,
        base: cli.base,
    }
    .apply(&mut cfg);
    let outcome = execute(&cfg).with_context(|| format!("experiment '{}'", cfg.name))?;
    let dir = out_dir(cli, &cfg);
    let files = write_outcome(&outcome, &dir)?;
    let s = &outcome.summary;
    let mut out = std::io::stdout().lock();
    // a closed stdout (e.g. piped into `head`) must not abort the run
    let headline = match s.max_difference {
        Some(d) if s.mode == "sweep" => format!("max difference = {}", output::fmt_sig(d)),
        _ => format!(
            "final S_B = {}  bound = {}  difference = {}",
            output::fmt_sig(s.final_entropy),
            output::fmt_sig(s.bound),
            output::fmt_sig(s.difference)
        ),
    };
    let _ = writeln!(
        out,
        "{}: {headline}  ({}, base {}, {:.2} s)",
        s.name, s.mode, s.log_base, s.wall_seconds
    );
    for f in files {
        let _ = writeln!(out, "  wrote {}", f.display());
    }
    Ok(())
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::from_file(path)
}

fn dispatch(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Run { config } => run_one(cli, load(config)?),
        Command::Bound { config } => {
            let mut cfg = load(config)?;
            cfg.mode = Mode::Bound;
            run_one(cli, cfg)
        }
        Command::Preset { name } => {
            let Some(p) = presets::lookup(name) else {
                bail!("unknown preset '{name}'; see `qdistill list-presets`");
            };
            for cfg in p.configs {
                run_one(cli, cfg)?;
            }
            Ok(())
        }
        Command::ListPresets => {
            for p in presets::all() {
                println!("{:<20} {}", p.name, p.description);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
