//! Experiment descriptions read from TOML.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qdistill_core::greedy::DEFAULT_TIE_EPSILON;
use qdistill_core::state::DEFAULT_QUADRATURE_POINTS;
use qdistill_core::{ControlSet, GreedyConfig, LogBase, ModelSpec, Objective};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Greedy search from the thermal state.
    Distill,
    /// Bound and initial entropies only.
    Bound,
    /// Search at `replay.source_beta`, then replay the path at `beta`.
    Replay,
    /// One distill run per grid point.
    Sweep,
    /// Distill, then replay under jittered step durations.
    Timekeeping,
    /// Greedy search with Gaussian step durations.
    RandomDt,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Distill => "distill",
            Mode::Bound => "bound",
            Mode::Replay => "replay",
            Mode::Sweep => "sweep",
            Mode::Timekeeping => "timekeeping",
            Mode::RandomDt => "random_dt",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreedySection {
    pub dt: f64,
    /// Number of steps; give this or `total_time`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default = "default_tie_epsilon")]
    pub tie_epsilon: f64,
    #[serde(default)]
    pub dt_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_tie_epsilon() -> f64 {
    DEFAULT_TIE_EPSILON
}

impl GreedySection {
    pub fn new(dt: f64, total_time: f64) -> Self {
        Self {
            dt,
            steps: None,
            total_time: Some(total_time),
            objective: Objective::Entropy,
            tie_epsilon: DEFAULT_TIE_EPSILON,
            dt_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn step_count(&self) -> Result<usize> {
        match (self.steps, self.total_time) {
            (Some(n), None) => Ok(n),
            (None, Some(t)) if t.is_finite() && t >= 0.0 && self.dt > 0.0 => Ok((t / self.dt).round() as usize),
            (None, Some(t)) => bail!("greedy.total_time must be finite and non-negative, got {t}"),
            (Some(_), Some(_)) => bail!("give either greedy.steps or greedy.total_time, not both"),
            (None, None) => bail!("greedy.steps or greedy.total_time is required"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplaySection {
    /// Inverse temperature the path is searched at.
    pub source_beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Beta,
    Hopping,
    Interaction,
    Dt,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Beta => "beta",
            SweepAxis::Hopping => "J",
            SweepAxis::Interaction => "U",
            SweepAxis::Dt => "delta_t",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimekeepingSection {
    pub sigmas: Vec<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    DEFAULT_QUADRATURE_POINTS
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Directory for result files; the command line may override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub mode: Mode,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub base: LogBase,
    #[serde(default = "ControlSet::tenths")]
    pub controls: ControlSet,
    /// Expected wall time, in seconds, on a typical workstation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_seconds: Option<f64>,
    pub model: ModelSpec,
    pub greedy: GreedySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay: Option<ReplaySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timekeeping: Option<TimekeepingSection>,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_beta() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| anyhow::anyhow!("{e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn greedy_config(&self) -> Result<GreedyConfig> {
        let g = &self.greedy;
        Ok(GreedyConfig {
            dt: g.dt,
            steps: g.step_count()?,
            objective: g.objective,
            tie_epsilon: g.tie_epsilon,
            base: self.base,
            rng_seed: g.seed,
            dt_sigma: g.dt_sigma,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            bail!("name must be a non-empty file stem, got {:?}", self.name);
        }
        self.model.validate().context("invalid [model]")?;
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            bail!("beta must be finite and non-negative, got {}", self.beta);
        }
        self.greedy_config()?.validate().context("invalid [greedy]")?;
        match self.mode {
            Mode::Replay => {
                let r = self.replay.as_ref().context("mode = \"replay\" needs a [replay] table")?;
                if !(r.source_beta.is_finite() && r.source_beta >= 0.0) {
                    bail!("replay.source_beta must be finite and non-negative");
                }
            }
            Mode::Sweep => {
                let s = self.sweep.as_ref().context("mode = \"sweep\" needs a [sweep] table")?;
                if s.values.is_empty() {
                    bail!("sweep.values is empty");
                }
            }
            Mode::Timekeeping => {
                let t = self
                    .timekeeping
                    .as_ref()
                    .context("mode = \"timekeeping\" needs a [timekeeping] table")?;
                if t.sigmas.is_empty() {
                    bail!("timekeeping.sigmas is empty");
                }
            }
            Mode::RandomDt => {
                if self.greedy.dt_sigma <= 0.0 {
                    bail!("mode = \"random_dt\" needs greedy.dt_sigma > 0");
                }
            }
            Mode::Distill | Mode::Bound => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
name = "demo"
mode = "distill"
beta = 1.0
base = "two"

[model]
kind = "bose_hubbard"
sites = 4
particles = 2
hopping = 1.0
interaction = 1.0
l_a = 1

[greedy]
dt = 0.1
total_time = 30.0
"#;

    #[test]
    fn parses_sample() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        assert_eq!(cfg.greedy_config().unwrap().steps, 300);
        assert_eq!(cfg.base, LogBase::Two);
        assert_eq!(cfg.controls, ControlSet::tenths());
    }

    #[test]
    fn round_trips() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn parse_error_names_the_line() {
        let broken = SAMPLE.replace("sites = 4", "sites = four");
        let msg = format!("{:#}", ExperimentConfig::from_toml_str(&broken).unwrap_err());
        assert!(msg.contains("line 9"), "{msg}");
    }

    #[test]
    fn mode_requirements() {
        let sweep = SAMPLE.replace("\"distill\"", "\"sweep\"");
        assert!(ExperimentConfig::from_toml_str(&sweep).is_err());
        let both = SAMPLE.replace("total_time = 30.0", "total_time = 30.0\nsteps = 3");
        assert!(ExperimentConfig::from_toml_str(&both).is_err());
        let dup = SAMPLE.replace("base = \"two\"", "base = \"two\"\ncontrols = [1.0, 1.0]");
        assert!(ExperimentConfig::from_toml_str(&dup).is_err());
    }
}
