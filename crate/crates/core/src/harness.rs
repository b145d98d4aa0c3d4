//! Seeded multi-trial experiments that write CSV.
//!
//! Two experiments are available:
//!
//! - a variance sweep, which compares the analytic variance of each strategy
//!   with the empirical variance of repeated estimates over a grid of budgets;
//! - an optimization benchmark, which runs Rosalin or Adam from random
//!   starting points and records the exact energy gap after every iteration.
//!
//! Configuration comes from a JSON file, command-line flags, or both; flags
//! win. Trials run in parallel but output is ordered by trial index, so a
//! configuration and seed always produce the same bytes.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::{Hamiltonian, HamiltonianError};
use crate::optimizer::{run_adam, run_rosalin, AdamConfig, Estimator, OptimizerError, RosalinConfig, RunTrace};
use crate::sampling::{whs_random_shots, Sampler, SamplingError, Strategy};
use crate::seed::SeedTree;
use crate::simulator::{exact_ground_energy, AnsatzCircuit, SimulatorError, StateVector, MAX_DENSE_QUBITS};
use crate::variance::{var_uds, var_wds, var_whs, var_wrs, var_wss, TermMoments, VarianceError};

pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SWEEP_BUDGET: u64 = 10_000;
pub const DEFAULT_OPTIMIZE_BUDGET: u64 = 100_000;
/// Number of steps in the shot grid of the aggregate curve.
pub const AGGREGATE_POINTS: u64 = 200;

/// Seed-tree label reserved for drawing starting parameters.
const INIT_LABEL: u64 = u64::MAX;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Hamiltonian { path: PathBuf, source: HamiltonianError },
    #[error(transparent)]
    Floor(SamplingError),
    #[error(transparent)]
    Optimizer(OptimizerError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
    #[error(transparent)]
    Variance(#[from] VarianceError),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 3 for fatal shot-floor
    /// violations, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Hamiltonian { .. } | HarnessError::Input { .. } => 2,
            HarnessError::Simulator(SimulatorError::TooLargeForDense(_) | SimulatorError::BadQubitCount(_)) => 2,
            HarnessError::Floor(_) => 3,
            HarnessError::Optimizer(OptimizerError::Sampling(SamplingError::BelowFloor { .. })) => 3,
            HarnessError::Optimizer(OptimizerError::InvalidConfig(_)) => 2,
            _ => 1,
        }
    }
}

impl From<OptimizerError> for HarnessError {
    fn from(e: OptimizerError) -> Self {
        HarnessError::Optimizer(e)
    }
}

impl From<SamplingError> for HarnessError {
    fn from(e: SamplingError) -> Self {
        match e {
            SamplingError::Simulator(s) => HarnessError::Simulator(s),
            other => HarnessError::Floor(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    VarianceSweep,
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    #[default]
    Rosalin,
    Adam,
}

impl std::str::FromStr for OptimizerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rosalin" => Ok(OptimizerKind::Rosalin),
            "adam" => Ok(OptimizerKind::Adam),
            _ => Err(format!("unknown optimizer {s:?} (expected rosalin or adam)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    #[default]
    None,
    QwcGreedy,
}

/// A single strategy or a list of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategyList {
    One(Strategy),
    Many(Vec<Strategy>),
}

impl StrategyList {
    pub fn into_vec(self) -> Vec<Strategy> {
        match self {
            StrategyList::One(s) => vec![s],
            StrategyList::Many(v) => v,
        }
    }
}

/// Partially specified configuration, as read from JSON or the command line.
/// Keys match the long command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct ConfigFile {
    pub hamiltonian: Option<PathBuf>,
    pub depth: Option<usize>,
    pub strategy: Option<StrategyList>,
    pub optimizer: Option<OptimizerKind>,
    pub budget: Option<u64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub group_qwc: Option<bool>,
    pub out: Option<PathBuf>,
    /// Parameters of the state used by the variance sweep.
    pub theta: Option<Vec<f64>>,
    /// Explicit Rosalin `s_min`.
    pub s_min: Option<u64>,
    /// Explicit shot grid for the variance sweep.
    pub shots: Option<Vec<u64>>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("invalid JSON config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Input { path: path.to_owned(), source })?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Fields set in `overrides` replace those in `self`.
    pub fn overlay(self, overrides: ConfigFile) -> ConfigFile {
        ConfigFile {
            hamiltonian: overrides.hamiltonian.or(self.hamiltonian),
            depth: overrides.depth.or(self.depth),
            strategy: overrides.strategy.or(self.strategy),
            optimizer: overrides.optimizer.or(self.optimizer),
            budget: overrides.budget.or(self.budget),
            trials: overrides.trials.or(self.trials),
            seed: overrides.seed.or(self.seed),
            group_qwc: overrides.group_qwc.or(self.group_qwc),
            out: overrides.out.or(self.out),
            theta: overrides.theta.or(self.theta),
            s_min: overrides.s_min.or(self.s_min),
            shots: overrides.shots.or(self.shots),
        }
    }
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub hamiltonian_path: PathBuf,
    pub depth: usize,
    pub strategies: Vec<Strategy>,
    pub optimizer: OptimizerKind,
    pub budget: u64,
    pub n_trials: usize,
    pub base_seed: u64,
    pub grouping: Grouping,
    pub output_path: Option<PathBuf>,
    pub theta: Option<Vec<f64>>,
    pub s_min: Option<u64>,
    pub shot_grid: Option<Vec<u64>>,
}

impl ExperimentConfig {
    /// Fills defaults and checks invariants.
    pub fn resolve(mode: Mode, file: ConfigFile) -> Result<Self, HarnessError> {
        let hamiltonian_path = file
            .hamiltonian
            .ok_or_else(|| HarnessError::Config("no Hamiltonian file given (--hamiltonian)".into()))?;
        let strategies = match (mode, file.strategy) {
            (_, Some(list)) => list.into_vec(),
            (Mode::VarianceSweep, None) => Strategy::ALL.to_vec(),
            (Mode::Optimize, None) => vec![Strategy::Wrs],
        };
        if strategies.is_empty() {
            return Err(HarnessError::Config("strategy list is empty".into()));
        }
        if mode == Mode::Optimize && strategies.len() != 1 {
            return Err(HarnessError::Config("optimize takes exactly one strategy".into()));
        }
        let n_trials = file.trials.unwrap_or(DEFAULT_TRIALS);
        if n_trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        let budget = file.budget.unwrap_or(match mode {
            Mode::VarianceSweep => DEFAULT_SWEEP_BUDGET,
            Mode::Optimize => DEFAULT_OPTIMIZE_BUDGET,
        });
        if mode == Mode::VarianceSweep && budget == 0 && file.shots.is_none() {
            return Err(HarnessError::Config("variance sweep budget must be at least 1".into()));
        }
        if let Some(grid) = &file.shots {
            if grid.is_empty() || grid.contains(&0) {
                return Err(HarnessError::Config("shot grid must be non-empty and positive".into()));
            }
        }
        Ok(Self {
            mode,
            hamiltonian_path,
            depth: file.depth.unwrap_or(1),
            strategies,
            optimizer: file.optimizer.unwrap_or_default(),
            budget,
            n_trials,
            base_seed: file.seed.unwrap_or(DEFAULT_SEED),
            grouping: if file.group_qwc.unwrap_or(false) { Grouping::QwcGreedy } else { Grouping::None },
            output_path: file.out,
            theta: file.theta,
            s_min: file.s_min,
            shot_grid: file.shots,
        })
    }

    /// Reads, normalises and optionally groups the Hamiltonian.
    pub fn load_hamiltonian(&self) -> Result<Hamiltonian, HarnessError> {
        let path = &self.hamiltonian_path;
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Input { path: path.clone(), source })?;
        let h = Hamiltonian::parse(&text).map_err(|source| HarnessError::Hamiltonian { path: path.clone(), source })?;
        match self.grouping {
            Grouping::None => Ok(h),
            Grouping::QwcGreedy => {
                h.group_qwc_greedy().map_err(|source| HarnessError::Hamiltonian { path: path.clone(), source })
            }
        }
    }
}

/// `1, 2, 5, 10, 20, 50, …` up to and including `max`.
pub fn log_grid(max: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for m in [1, 2, 5] {
            let Some(v) = decade.checked_mul(m) else { break 'outer };
            if v > max {
                break 'outer;
            }
            grid.push(v);
        }
        let Some(next) = decade.checked_mul(10) else { break };
        decade = next;
    }
    if grid.last() != Some(&max) && max > 0 {
        grid.push(max);
    }
    grid
}

fn uniform_theta(seed: u64, d: usize) -> Vec<f64> {
    let mut rng = SeedTree::new(seed).child(INIT_LABEL).rng();
    (0..d).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

/// Closed-form variance of `strategy` at budget `s_tot`. UDS is evaluated at
/// its effective budget `N⌊s_tot/N⌋`.
pub fn analytic_variance(strategy: Strategy, h: &Hamiltonian, moments: &TermMoments, s_tot: u64) -> Result<f64, HarnessError> {
    let c = h.coefficients();
    let s = s_tot as f64;
    Ok(match strategy {
        Strategy::Uds => {
            let n = h.n_terms() as u64;
            var_uds(&c, moments, (n * (s_tot / n)) as f64)?
        }
        Strategy::Wds => var_wds(&c, moments, s)?,
        Strategy::Wrs => var_wrs(&c, moments, s)?,
        Strategy::Whs => var_whs(&c, moments, s, whs_random_shots(h, s_tot) as f64)?,
        Strategy::Wss => var_wss(&c, moments, s)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceRow {
    pub strategy: Strategy,
    pub s_tot: u64,
    pub analytic_variance: f64,
    pub empirical_variance: f64,
    pub n_trials: usize,
}

/// Sample variance (denominator `n − 1`) of repeated energy estimates.
pub fn empirical_variance(
    sampler: &Sampler,
    h: &Hamiltonian,
    state: &StateVector,
    s_tot: u64,
    n_trials: usize,
    seeds: SeedTree,
) -> Result<f64, HarnessError> {
    let distributions = state.term_distributions(h)?;
    let mut values = Vec::with_capacity(n_trials);
    for t in 0..n_trials {
        values.push(sampler.estimate_energy(h, &distributions, s_tot, &mut seeds.child(t as u64).rng())?);
    }
    Ok(sample_variance(&values))
}

fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Analytic and empirical variance for every strategy over the shot grid.
/// UDS and WDS rows below their floors are omitted.
pub fn run_variance_sweep(config: &ExperimentConfig) -> Result<Vec<VarianceRow>, HarnessError> {
    let h = config.load_hamiltonian()?;
    let circuit = AnsatzCircuit::new(h.n_qubits(), config.depth)?;
    let theta = match &config.theta {
        Some(t) if t.len() != circuit.parameter_count() => {
            return Err(HarnessError::Config(format!(
                "theta has {} entries, the depth-{} ansatz on {} qubits needs {}",
                t.len(),
                config.depth,
                h.n_qubits(),
                circuit.parameter_count()
            )))
        }
        Some(t) => t.clone(),
        None => uniform_theta(config.base_seed, circuit.parameter_count()),
    };
    let state = circuit.prepare(&theta)?;
    let moments = TermMoments::from_state(&state, &h)?;
    let grid = config.shot_grid.clone().unwrap_or_else(|| log_grid(config.budget));
    let root = SeedTree::new(config.base_seed);

    let cells: Vec<(usize, Strategy, u64)> = config
        .strategies
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| grid.iter().map(move |&n| (i, s, n)))
        .filter(|&(_, s, n)| n >= s.shot_floor(&h))
        .collect();
    cells
        .into_par_iter()
        .map(|(i, strategy, s_tot)| {
            let sampler = Sampler::new(strategy);
            let seeds = root.path(&[i as u64, s_tot]);
            Ok(VarianceRow {
                strategy,
                s_tot,
                analytic_variance: analytic_variance(strategy, &h, &moments, s_tot)?,
                empirical_variance: empirical_variance(&sampler, &h, &state, s_tot, config.n_trials, seeds)?,
                n_trials: config.n_trials,
            })
        })
        .collect()
}

pub fn variance_csv(rows: &[VarianceRow]) -> String {
    let mut out = String::from("strategy,s_tot,analytic_variance,empirical_variance,n_trials\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.strategy, r.s_tot, r.analytic_variance, r.empirical_variance, r.n_trials);
    }
    out
}

/// One point of a per-trial trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub iteration: u64,
    pub shots: u64,
    pub energy: f64,
    pub delta_e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub trial: usize,
    pub seed: u64,
    pub points: Vec<TracePoint>,
}

impl TrialTrace {
    pub fn final_delta_e(&self) -> f64 {
        self.points.last().expect("trace always holds the initial point").delta_e
    }

    /// `ΔE` of the last point with at most `shots` shots spent.
    pub fn delta_e_at(&self, shots: u64) -> f64 {
        let idx = self.points.partition_point(|p| p.shots <= shots);
        self.points[idx.saturating_sub(1)].delta_e
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub shots: u64,
    pub mean_delta_e: f64,
    pub stderr_delta_e: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub ground_energy: f64,
    pub trials: Vec<TrialTrace>,
    pub aggregate: Vec<AggregatePoint>,
}

/// Exact energies along an optimizer trace, with the starting point first.
pub fn energy_trace(
    trace: &RunTrace,
    theta0: &[f64],
    h: &Hamiltonian,
    circuit: &AnsatzCircuit,
    ground: f64,
) -> Result<Vec<TracePoint>, HarnessError> {
    let e0 = circuit.prepare(theta0)?.energy(h)?;
    let mut points = vec![TracePoint { iteration: 0, shots: 0, energy: e0, delta_e: e0 - ground }];
    for r in &trace.records {
        let energy = circuit.prepare(&r.theta)?.energy(h)?;
        points.push(TracePoint { iteration: r.iteration + 1, shots: r.shots_used, energy, delta_e: energy - ground });
    }
    Ok(points)
}

/// Mean and standard error of `ΔE` across trials on `0, step, 2·step, …, budget`
/// with `step = max(1, budget/200)`, using previous-value interpolation.
pub fn aggregate(trials: &[TrialTrace], budget: u64) -> Vec<AggregatePoint> {
    let step = (budget / AGGREGATE_POINTS).max(1);
    let mut grid: Vec<u64> = (0..=budget / step).map(|i| i * step).collect();
    if grid.last() != Some(&budget) {
        grid.push(budget);
    }
    grid.into_iter()
        .map(|shots| {
            let values: Vec<f64> = trials.iter().map(|t| t.delta_e_at(shots)).collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            AggregatePoint { shots, mean_delta_e: mean, stderr_delta_e: (sample_variance(&values) / n).sqrt() }
        })
        .collect()
}

/// Validated optimizer settings for a benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerSettings {
    Rosalin(RosalinConfig),
    Adam(AdamConfig),
}

impl OptimizerSettings {
    pub fn run(&self, h: &Hamiltonian, circuit: &AnsatzCircuit, theta0: &[f64], seed: u64) -> Result<RunTrace, OptimizerError> {
        match self {
            OptimizerSettings::Rosalin(c) => run_rosalin(c, h, circuit, theta0, seed),
            OptimizerSettings::Adam(c) => run_adam(c, h, circuit, theta0, seed),
        }
    }
}

/// Rosalin uses the recommended hyperparameters with `s_min` raised to the
/// strategy floor unless set explicitly; Adam uses its defaults.
pub fn optimizer_settings(config: &ExperimentConfig, h: &Hamiltonian) -> Result<OptimizerSettings, HarnessError> {
    let estimator = Estimator::sampled(config.strategies[0]);
    Ok(match config.optimizer {
        OptimizerKind::Rosalin => {
            let mut rc = RosalinConfig::recommended(h, config.budget, estimator);
            rc.s_min = config.s_min.unwrap_or_else(|| rc.s_min.max(estimator.shot_floor(h)));
            rc.validate(h)?;
            OptimizerSettings::Rosalin(rc)
        }
        OptimizerKind::Adam => {
            let ac = AdamConfig::new(config.budget, estimator);
            ac.validate(h)?;
            OptimizerSettings::Adam(ac)
        }
    })
}

pub fn run_optimization_benchmark(config: &ExperimentConfig) -> Result<Benchmark, HarnessError> {
    let h = config.load_hamiltonian()?;
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(SimulatorError::TooLargeForDense(h.n_qubits()).into());
    }
    let circuit = AnsatzCircuit::new(h.n_qubits(), config.depth)?;
    let ground = exact_ground_energy(&h)?;
    let settings = optimizer_settings(config, &h)?;
    let trials: Vec<TrialTrace> = (0..config.n_trials)
        .into_par_iter()
        .map(|t| {
            let seed = config.base_seed.wrapping_add(t as u64);
            let theta0 = uniform_theta(seed, circuit.parameter_count());
            let trace = settings.run(&h, &circuit, &theta0, seed)?;
            Ok(TrialTrace { trial: t, seed, points: energy_trace(&trace, &theta0, &h, &circuit, ground)? })
        })
        .collect::<Result<_, HarnessError>>()?;
    let aggregate = aggregate(&trials, config.budget);
    Ok(Benchmark { ground_energy: ground, trials, aggregate })
}

pub fn trace_csv(trials: &[TrialTrace]) -> String {
    let mut out = String::from("trial,iteration,shots,energy,delta_e\n");
    for t in trials {
        for p in &t.points {
            let _ = writeln!(out, "{},{},{},{},{}", t.trial, p.iteration, p.shots, p.energy, p.delta_e);
        }
    }
    out
}

pub fn aggregate_csv(points: &[AggregatePoint]) -> String {
    let mut out = String::from("shots,mean_delta_e,stderr_delta_e\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.shots, p.mean_delta_e, p.stderr_delta_e);
    }
    out
}

/// `dir/name.csv` → `dir/name_aggregate.csv`.
pub fn aggregate_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_aggregate.csv"))
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Output { path: path.to_owned(), source })
}

/// Runs the configured experiment. With an output path the CSV files are
/// written there; otherwise their contents are returned for printing.
pub fn run(config: &ExperimentConfig) -> Result<String, HarnessError> {
    let (main, extra) = match config.mode {
        Mode::VarianceSweep => (variance_csv(&run_variance_sweep(config)?), None),
        Mode::Optimize => {
            let bench = run_optimization_benchmark(config)?;
            (trace_csv(&bench.trials), Some(aggregate_csv(&bench.aggregate)))
        }
    };
    match &config.output_path {
        Some(path) => {
            write_file(path, &main)?;
            if let Some(agg) = extra {
                write_file(&aggregate_path(path), &agg)?;
            }
            Ok(String::new())
        }
        None => Ok(match extra {
            Some(agg) => format!("{main}\n{agg}"),
            None => main,
        }),
    }
}
