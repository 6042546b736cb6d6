//! Greedy bang-bang control: each step picks the control value whose
//! one-step evolution gives the lowest subsystem entropy (or the highest
//! subsystem purity).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::BoundReport;
use crate::error::{Error, Result};
use crate::fock::Side;
use crate::operators::ModelSpec;
use crate::state::{
    evolve, imperfect_timekeeping_with_spectrum, purity, von_neumann_entropy, DensityMatrix, LogBase,
    Propagator, Spectrum,
};
use crate::system::ControlledSystem;

pub const DEFAULT_TIE_EPSILON: f64 = 1e-12;

/// Candidate control amplitudes, in evaluation order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ControlSet {
    values: Vec<f64>,
}

impl ControlSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidControlSet("no candidates".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidControlSet(format!("non-finite value {v}")));
        }
        for (i, a) in values.iter().enumerate() {
            if values[..i].contains(a) {
                return Err(Error::InvalidControlSet(format!("duplicate value {a}")));
            }
        }
        Ok(Self { values })
    }

    /// `{1, 0.9, …, 0.1, 0}`.
    pub fn tenths() -> Self {
        Self {
            values: (0..=10).rev().map(|k| k as f64 / 10.0).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl TryFrom<Vec<f64>> for ControlSet {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ControlSet> for Vec<f64> {
    fn from(c: ControlSet) -> Self {
        c.values
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Minimize `S(ρ_B)`.
    #[default]
    Entropy,
    /// Maximize `Tr ρ_B²`.
    Purity,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Entropy => "entropy",
            Objective::Purity => "purity",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Objective::Entropy),
            "purity" => Ok(Objective::Purity),
            other => Err(Error::InvalidParameter(format!("unknown objective '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    /// Step duration (the mean, for the random-δt search).
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default = "default_tie_epsilon")]
    pub tie_epsilon: f64,
    #[serde(default = "default_base")]
    pub base: LogBase,
    #[serde(default)]
    pub rng_seed: u64,
    /// Standard deviation of the step duration; 0 keeps every step at `dt`.
    #[serde(default)]
    pub dt_sigma: f64,
}

fn default_tie_epsilon() -> f64 {
    DEFAULT_TIE_EPSILON
}

fn default_base() -> LogBase {
    LogBase::Natural
}

impl GreedyConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            objective: Objective::Entropy,
            tie_epsilon: DEFAULT_TIE_EPSILON,
            base: LogBase::Natural,
            rng_seed: 0,
            dt_sigma: 0.0,
        }
    }

    /// Step count covering `total_time` at step `dt`, rounded to nearest.
    pub fn for_duration(dt: f64, total_time: f64) -> Self {
        Self::new(dt, (total_time / dt).round() as usize)
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        self.base = base;
        self
    }

    pub fn with_random_dt(mut self, sigma: f64, seed: u64) -> Self {
        self.dt_sigma = sigma;
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("δt must be positive, got {}", self.dt)));
        }
        if !(self.tie_epsilon.is_finite() && self.tie_epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tie_epsilon must be >= 0, got {}",
                self.tie_epsilon
            )));
        }
        if !(self.dt_sigma.is_finite() && self.dt_sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "δt spread must be >= 0, got {}",
                self.dt_sigma
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub gamma: f64,
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: ModelSpec,
    /// Inverse temperature of the initial state, when it was thermal.
    pub beta: Option<f64>,
    pub config: GreedyConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlPath {
    pub steps: Vec<PathStep>,
    pub provenance: Provenance,
}

impl ControlPath {
    pub fn found_at(mut self, beta: f64) -> Self {
        self.provenance.beta = Some(beta);
        self
    }

    pub fn total_time(&self) -> f64 {
        self.steps.iter().map(|s| s.dt).sum()
    }
}

/// One row of the time series. `n_a`/`n_b` are NaN for qubit models and
/// `gamma` is `None` at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub s_b: f64,
    pub s_a: f64,
    pub s_ab: f64,
    pub i_ab: f64,
    pub p_b: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub series: Vec<StepRecord>,
    pub bound: BoundReport,
    /// Worst `‖U†U − I‖_max` over all propagators applied.
    pub max_unitarity_defect: f64,
}

impl ExperimentRecord {
    pub fn initial(&self) -> &StepRecord {
        &self.series[0]
    }

    pub fn last(&self) -> &StepRecord {
        self.series.last().expect("series always holds t = 0")
    }

    pub fn final_entropy(&self) -> f64 {
        self.last().s_b
    }

    /// Final `S_B` minus the bound.
    pub fn difference(&self) -> f64 {
        self.final_entropy() - self.bound.bound_entropy
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimekeepingPoint {
    pub sigma: f64,
    pub relative_error: f64,
}

/// Eigen-decompositions per γ and propagators per `(γ, δt)`.
struct PropagatorCache<'a> {
    system: &'a ControlledSystem,
    spectra: HashMap<u64, Spectrum>,
    propagators: HashMap<(u64, u64), Propagator>,
    worst_defect: f64,
}

impl<'a> PropagatorCache<'a> {
    fn new(system: &'a ControlledSystem) -> Self {
        Self {
            system,
            spectra: HashMap::new(),
            propagators: HashMap::new(),
            worst_defect: 0.0,
        }
    }

    fn spectrum(&mut self, gamma: f64) -> &Spectrum {
        let system = self.system;
        self.spectra
            .entry(gamma.to_bits())
            .or_insert_with(|| system.hamiltonian(gamma).spectrum())
    }

    fn prepare(&mut self, gammas: &[f64], dt: f64) {
        for &g in gammas {
            let key = (g.to_bits(), dt.to_bits());
            if !self.propagators.contains_key(&key) {
                let u = self.spectrum(g).propagator(dt);
                self.worst_defect = self.worst_defect.max(u.unitarity_defect());
                self.propagators.insert(key, u);
            }
        }
    }

    fn get(&self, gamma: f64, dt: f64) -> &Propagator {
        &self.propagators[&(gamma.to_bits(), dt.to_bits())]
    }
}

fn observe(
    system: &ControlledSystem,
    rho: &DensityMatrix,
    t: f64,
    gamma: Option<f64>,
    base: LogBase,
) -> Result<StepRecord> {
    let rho_a = system.reduced(rho, Side::A)?;
    let rho_b = system.reduced(rho, Side::B)?;
    let s_a = von_neumann_entropy(&rho_a, base);
    let s_b = von_neumann_entropy(&rho_b, base);
    let s_ab = von_neumann_entropy(rho, base);
    Ok(StepRecord {
        t,
        s_b,
        s_a,
        s_ab,
        i_ab: s_a + s_b - s_ab,
        p_b: purity(&rho_b),
        n_a: system.number(&rho_a, Side::A)?.unwrap_or(f64::NAN),
        n_b: system.number(&rho_b, Side::B)?.unwrap_or(f64::NAN),
        gamma,
    })
}

/// Index of the winning candidate: best score, then the largest γ among
/// all scores within `eps` of it.
fn select(gammas: &[f64], scores: &[f64], objective: Objective, eps: f64) -> usize {
    let best = match objective {
        Objective::Entropy => scores.iter().copied().fold(f64::INFINITY, f64::min),
        Objective::Purity => scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    let near = |s: f64| match objective {
        Objective::Entropy => s <= best + eps,
        Objective::Purity => s >= best - eps,
    };
    let mut pick: Option<usize> = None;
    for (k, (&g, &s)) in gammas.iter().zip(scores).enumerate() {
        if near(s) && pick.is_none_or(|p| g > gammas[p]) {
            pick = Some(k);
        }
    }
    pick.expect("at least one candidate attains the optimum")
}

fn score(system: &ControlledSystem, rho: &DensityMatrix, cfg: &GreedyConfig) -> Result<f64> {
    let rho_b = system.reduced(rho, Side::B)?;
    Ok(match cfg.objective {
        Objective::Entropy => von_neumann_entropy(&rho_b, cfg.base),
        Objective::Purity => purity(&rho_b),
    })
}

fn search(
    system: &ControlledSystem,
    rho0: &DensityMatrix,
    cset: &ControlSet,
    cfg: &GreedyConfig,
    mut next_dt: impl FnMut() -> f64,
) -> Result<(ControlPath, ExperimentRecord)> {
    cfg.validate()?;
    check_state(system, rho0)?;
    let bound = system.bound(rho0, cfg.base)?;
    let mut cache = PropagatorCache::new(system);
    let mut rho = rho0.clone();
    let mut t = 0.0;
    let mut series = Vec::with_capacity(cfg.steps + 1);
    let mut steps = Vec::with_capacity(cfg.steps);
    series.push(observe(system, &rho, t, None, cfg.base)?);
    let gammas = cset.values();
    for _ in 0..cfg.steps {
        let dt = next_dt();
        cache.prepare(gammas, dt);
        let candidates: Vec<(DensityMatrix, f64)> = gammas
            .par_iter()
            .map(|&g| {
                let next = evolve(&rho, cache.get(g, dt))?;
                let s = score(system, &next, cfg)?;
                Ok((next, s))
            })
            .collect::<Result<_>>()?;
        let scores: Vec<f64> = candidates.iter().map(|c| c.1).collect();
        let k = select(gammas, &scores, cfg.objective, cfg.tie_epsilon);
        rho = candidates.into_iter().nth(k).expect("index from select").0;
        t += dt;
        steps.push(PathStep { gamma: gammas[k], dt });
        series.push(observe(system, &rho, t, Some(gammas[k]), cfg.base)?);
    }
    let path = ControlPath {
        steps,
        provenance: Provenance {
            model: system.spec().clone(),
            beta: None,
            config: cfg.clone(),
        },
    };
    let record = ExperimentRecord {
        series,
        bound,
        max_unitarity_defect: cache.worst_defect,
    };
    Ok((path, record))
}

fn check_state(system: &ControlledSystem, rho: &DensityMatrix) -> Result<()> {
    if rho.tag() != system.tag() {
        return Err(Error::TagMismatch {
            expected: system.tag().to_string(),
            found: rho.tag().to_string(),
        });
    }
    Ok(())
}

/// Fixed-step greedy search. `cfg.dt_sigma` is ignored here.
pub fn greedy_distill(
    system: &ControlledSystem,
    rho0: &DensityMatrix,
    cset: &ControlSet,
    cfg: &GreedyConfig,
) -> Result<(ControlPath, ExperimentRecord)> {
    search(system, rho0, cset, cfg, || cfg.dt)
}

/// Greedy search with each step's δt drawn from `N(cfg.dt, cfg.dt_sigma²)`,
/// clipped below at `cfg.dt / 100`, from a ChaCha stream seeded by
/// `cfg.rng_seed`.
pub fn greedy_distill_random_dt(
    system: &ControlledSystem,
    rho0: &DensityMatrix,
    cset: &ControlSet,
    cfg: &GreedyConfig,
) -> Result<(ControlPath, ExperimentRecord)> {
    cfg.validate()?;
    if cfg.dt_sigma == 0.0 {
        return greedy_distill(system, rho0, cset, cfg);
    }
    let normal = Normal::new(cfg.dt, cfg.dt_sigma)
        .map_err(|e| Error::InvalidParameter(format!("δt distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let floor = cfg.dt / 100.0;
    search(system, rho0, cset, cfg, || normal.sample(&mut rng).max(floor))
}

fn check_replay(system: &ControlledSystem, path: &ControlPath) -> Result<()> {
    if &path.provenance.model != system.spec() {
        return Err(Error::BasisMismatch(format!(
            "path was found on {:?}, replay target is {:?}",
            path.provenance.model,
            system.spec()
        )));
    }
    Ok(())
}

/// Applies a recorded schedule to a new initial state without searching.
pub fn replay_path(system: &ControlledSystem, rho0: &DensityMatrix, path: &ControlPath) -> Result<ExperimentRecord> {
    check_replay(system, path)?;
    check_state(system, rho0)?;
    let base = path.provenance.config.base;
    let bound = system.bound(rho0, base)?;
    let mut cache = PropagatorCache::new(system);
    let mut rho = rho0.clone();
    let mut t = 0.0;
    let mut series = Vec::with_capacity(path.steps.len() + 1);
    series.push(observe(system, &rho, t, None, base)?);
    for step in &path.steps {
        cache.prepare(&[step.gamma], step.dt);
        rho = evolve(&rho, cache.get(step.gamma, step.dt))?;
        t += step.dt;
        series.push(observe(system, &rho, t, Some(step.gamma), base)?);
    }
    Ok(ExperimentRecord {
        series,
        bound,
        max_unitarity_defect: cache.worst_defect,
    })
}

/// Replays `path` with Gaussian jitter of width σ on every step duration and
/// reports `|S_B^σ − S_B^0| / S_B^0` for the final state.
pub fn timekeeping_robustness(
    system: &ControlledSystem,
    rho0: &DensityMatrix,
    path: &ControlPath,
    sigmas: &[f64],
    points: usize,
) -> Result<Vec<TimekeepingPoint>> {
    check_replay(system, path)?;
    check_state(system, rho0)?;
    if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::InvalidParameter(format!("σ must be >= 0, got {s}")));
    }
    let base = path.provenance.config.base;
    let mut cache = PropagatorCache::new(system);
    for step in &path.steps {
        cache.spectrum(step.gamma);
    }
    let spectra = &cache.spectra;
    let reference = replay_path(system, rho0, path)?.final_entropy();
    sigmas
        .par_iter()
        .map(|&sigma| {
            // a sharp clock is the perfect replay
            if sigma == 0.0 {
                return Ok(TimekeepingPoint { sigma, relative_error: 0.0 });
            }
            let mut rho = rho0.clone();
            for step in &path.steps {
                let spec = &spectra[&step.gamma.to_bits()];
                rho = imperfect_timekeeping_with_spectrum(&rho, spec, step.dt, sigma, points)?;
            }
            let s_b = von_neumann_entropy(&system.reduced(&rho, Side::B)?, base);
            let relative_error = if reference.abs() > 0.0 {
                (s_b - reference).abs() / reference.abs()
            } else {
                (s_b - reference).abs()
            };
            Ok(TimekeepingPoint { sigma, relative_error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{propagator, DEFAULT_QUADRATURE_POINTS};

    fn bh(l: usize, n: usize, l_a: usize) -> ControlledSystem {
        ControlledSystem::from_spec(&ModelSpec::bose_hubbard(l, n, 1.0, 1.0, l_a)).unwrap()
    }

    #[test]
    fn control_set_validation() {
        assert!(ControlSet::new(vec![]).is_err());
        assert!(ControlSet::new(vec![0.5, 0.5]).is_err());
        assert!(ControlSet::new(vec![1.0, f64::NAN]).is_err());
        assert_eq!(ControlSet::tenths().len(), 11);
        assert_eq!(ControlSet::tenths().values()[0], 1.0);
    }

    #[test]
    fn selection_tie_prefers_largest_gamma() {
        let g = [0.2, 1.0, 0.5];
        assert_eq!(select(&g, &[0.3, 0.3, 0.3], Objective::Entropy, 0.0), 1);
        assert_eq!(select(&g, &[0.1, 0.3, 0.1], Objective::Entropy, 0.0), 2);
        assert_eq!(select(&g, &[0.1, 0.3, 0.2], Objective::Entropy, 0.0), 0);
        assert_eq!(select(&g, &[0.1, 0.1 + 1e-13, 0.2], Objective::Entropy, 1e-12), 1);
        assert_eq!(select(&g, &[0.1, 0.9, 0.9], Objective::Purity, 0.0), 1);
    }

    #[test]
    fn zero_control_is_plain_drift() {
        let sys = bh(4, 2, 1);
        let rho0 = DensityMatrix::diagonal(
            &(0..10).map(|i| if i == 3 { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
            sys.tag().clone(),
        )
        .unwrap();
        let cfg = GreedyConfig::new(0.2, 10);
        let (path, rec) = greedy_distill(&sys, &rho0, &ControlSet::new(vec![0.0]).unwrap(), &cfg).unwrap();
        assert!(path.steps.iter().all(|s| s.gamma == 0.0));
        let u = propagator(sys.drift(), 0.2);
        let mut rho = rho0.clone();
        for k in 1..=10 {
            rho = evolve(&rho, &u).unwrap();
            let s = von_neumann_entropy(&sys.reduced(&rho, Side::B).unwrap(), LogBase::Natural);
            assert!((s - rec.series[k].s_b).abs() < 1e-10);
        }
    }

    #[test]
    fn series_shape_and_invariants() {
        let sys = bh(4, 2, 1);
        let rho0 = sys.thermal_state(1.0).unwrap();
        let cfg = GreedyConfig::new(0.1, 40);
        let (path, rec) = greedy_distill(&sys, &rho0, &ControlSet::tenths(), &cfg).unwrap();
        assert_eq!(path.steps.len(), 40);
        assert_eq!(rec.series.len(), 41);
        assert!(rec.initial().gamma.is_none());
        let s_ab = rec.initial().s_ab;
        let n0 = rec.initial().n_a + rec.initial().n_b;
        for r in &rec.series {
            assert!(r.s_b >= rec.bound.bound_entropy - 1e-9);
            assert!((r.s_ab - s_ab).abs() < 1e-9);
            assert!((r.n_a + r.n_b - n0).abs() < 1e-10);
        }
        assert!(rec.max_unitarity_defect < 1e-10);
        assert!(rec.final_entropy() < rec.initial().s_b);
    }

    #[test]
    fn replay_reproduces_search() {
        let sys = bh(3, 2, 1);
        let rho0 = sys.thermal_state(1.0).unwrap();
        let cfg = GreedyConfig::new(0.1, 20);
        let (path, rec) = greedy_distill(&sys, &rho0, &ControlSet::tenths(), &cfg).unwrap();
        let again = replay_path(&sys, &rho0, &path).unwrap();
        assert_eq!(again.series, rec.series);
        let other = bh(3, 2, 2);
        assert!(replay_path(&other, &other.thermal_state(1.0).unwrap(), &path).is_err());
    }

    #[test]
    fn random_dt_reduces_to_fixed_and_is_reproducible() {
        let sys = bh(3, 2, 1);
        let rho0 = sys.thermal_state(1.0).unwrap();
        let cfg = GreedyConfig::new(0.1, 15);
        let (p0, _) = greedy_distill(&sys, &rho0, &ControlSet::tenths(), &cfg).unwrap();
        let (p1, _) = greedy_distill_random_dt(&sys, &rho0, &ControlSet::tenths(), &cfg).unwrap();
        assert_eq!(p0, p1);
        let noisy = cfg.clone().with_random_dt(0.05, 7);
        let (a, _) = greedy_distill_random_dt(&sys, &rho0, &ControlSet::tenths(), &noisy).unwrap();
        let (b, _) = greedy_distill_random_dt(&sys, &rho0, &ControlSet::tenths(), &noisy).unwrap();
        assert_eq!(a, b);
        assert!(a.steps.iter().all(|s| s.dt >= 0.001));
        assert!(a.steps.iter().any(|s| s.dt != 0.1));
    }

    #[test]
    fn timekeeping_zero_sigma_is_exact() {
        let sys = bh(3, 2, 1);
        let rho0 = sys.thermal_state(1.0).unwrap();
        let (path, _) = greedy_distill(&sys, &rho0, &ControlSet::tenths(), &GreedyConfig::new(0.1, 10)).unwrap();
        let pts = timekeeping_robustness(&sys, &rho0, &path, &[0.0, 0.05], DEFAULT_QUADRATURE_POINTS).unwrap();
        assert!(pts[0].relative_error < 1e-10);
        assert!(pts[1].relative_error >= 0.0);
    }
}
