//! Parameter-shift gradient descent with adaptive shot counts (Rosalin), and
//! an Adam baseline that spends a fixed number of shots per expectation.
//!
//! Both optimizers draw every random number from a [`SeedTree`] keyed by
//! `(iteration, component, shift sign)`, so a run is a pure function of its
//! configuration and seed.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::numeric::ceil_tol;
use crate::sampling::{allocate_uds, allocate_wds, estimate_on_state, Sampler, SamplingError, Strategy};
use crate::seed::SeedTree;
use crate::simulator::{Ansatz, SimulatorError};

/// Shots per expectation value used by the Adam baseline unless the strategy
/// floor is larger.
pub const ADAM_BASE_SHOTS: u64 = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("the circuit has no parameters")]
    NoParameters,
    #[error("expected {expected} parameters, got {found}")]
    ParameterCount { expected: usize, found: usize },
    #[error("gradient evaluation needs at least 2 shots, got {0}")]
    TooFewShots(u64),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
}

/// Source of energy estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Exact expectation values; shots are charged but never drawn.
    Exact,
    /// Single-shot estimates under a sampling strategy.
    Sampled(Sampler),
}

impl Estimator {
    pub fn sampled(strategy: Strategy) -> Self {
        Estimator::Sampled(Sampler::new(strategy))
    }

    /// Smallest per-estimate shot count the estimator accepts.
    pub fn shot_floor(&self, h: &Hamiltonian) -> u64 {
        match self {
            Estimator::Exact => 1,
            Estimator::Sampled(s) => s.strategy.shot_floor(h),
        }
    }
}

/// A parameter-shift gradient component and the single-shot variance behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientSample {
    pub gradient: f64,
    /// Unbiased sample variance of the per-shot gradient values; zero in
    /// exact mode.
    pub variance: f64,
}

fn shifted(theta: &[f64], component: usize, shift: f64) -> Vec<f64> {
    let mut t = theta.to_vec();
    t[component] += shift;
    t
}

fn check_theta(theta: &[f64], circuit: &dyn Ansatz) -> Result<(), OptimizerError> {
    let expected = circuit.parameter_count();
    if expected == 0 {
        return Err(OptimizerError::NoParameters);
    }
    if theta.len() != expected {
        return Err(OptimizerError::ParameterCount { expected, found: theta.len() });
    }
    Ok(())
}

/// Estimates `∂E/∂θ_ℓ` from `s_tot` shots at each of `θ ± (π/2)ê_ℓ`.
///
/// The two single-shot vectors are paired entry by entry; `gradient` is the
/// mean of `(Ê⁺_j − Ê⁻_j)/2` and `variance` its unbiased sample variance.
pub fn i_evaluate(
    theta: &[f64],
    s_tot: u64,
    component: usize,
    h: &Hamiltonian,
    circuit: &dyn Ansatz,
    estimator: &Estimator,
    seeds: SeedTree,
) -> Result<GradientSample, OptimizerError> {
    if s_tot < 2 {
        return Err(OptimizerError::TooFewShots(s_tot));
    }
    check_theta(theta, circuit)?;
    let plus = circuit.prepare(&shifted(theta, component, FRAC_PI_2))?;
    let minus = circuit.prepare(&shifted(theta, component, -FRAC_PI_2))?;
    match estimator {
        Estimator::Exact => {
            let gradient = (plus.energy(h)? - minus.energy(h)?) / 2.0;
            Ok(GradientSample { gradient, variance: 0.0 })
        }
        Estimator::Sampled(sampler) => {
            let e_plus = estimate_on_state(&plus, s_tot, sampler, h, &mut seeds.child(0).rng())?;
            let e_minus = estimate_on_state(&minus, s_tot, sampler, h, &mut seeds.child(1).rng())?;
            let diffs: Vec<f64> =
                e_plus.entries().iter().zip(e_minus.entries()).map(|(p, m)| (p - m) / 2.0).collect();
            let n = diffs.len() as f64;
            let gradient = diffs.iter().sum::<f64>() / n;
            let variance = if diffs.len() < 2 {
                0.0
            } else {
                diffs.iter().map(|d| (d - gradient).powi(2)).sum::<f64>() / (n - 1.0)
            };
            Ok(GradientSample { gradient, variance })
        }
    }
}

/// When gradient components see the parameter updates of earlier components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateOrder {
    /// Update `θ_ℓ` right after evaluating component `ℓ`.
    #[default]
    Sequential,
    /// Evaluate every component at the same `θ`, then update all of them.
    Simultaneous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosalinConfig {
    pub learning_rate: f64,
    pub s_min: u64,
    /// Total shots the optimizer may spend.
    pub budget: u64,
    pub lipschitz: f64,
    pub mu: f64,
    pub bias: f64,
    /// Upper bound on any recommended shot count.
    pub shot_cap: u64,
    pub estimator: Estimator,
    #[serde(default)]
    pub update_order: UpdateOrder,
}

impl RosalinConfig {
    /// Defaults: `L = Σ|c_i|`, `α = 1/L`, `μ = 0.99`, `b = 1e-6`,
    /// `s_min = 2`, shot cap `10⁴`.
    pub fn recommended(h: &Hamiltonian, budget: u64, estimator: Estimator) -> Self {
        let lipschitz = h.one_norm();
        Self {
            learning_rate: 1.0 / lipschitz,
            s_min: 2,
            budget,
            lipschitz,
            mu: 0.99,
            bias: 1e-6,
            shot_cap: 10_000,
            estimator,
            update_order: UpdateOrder::default(),
        }
    }

    pub fn rosalin1(h: &Hamiltonian, budget: u64) -> Self {
        Self::recommended(h, budget, Estimator::sampled(Strategy::Wrs))
    }

    pub fn rosalin2(h: &Hamiltonian, budget: u64) -> Self {
        Self::recommended(h, budget, Estimator::sampled(Strategy::Whs))
    }

    pub fn validate(&self, h: &Hamiltonian) -> Result<(), OptimizerError> {
        let bad = |msg: String| Err(OptimizerError::InvalidConfig(msg));
        if !(self.lipschitz.is_finite() && self.lipschitz > 0.0) {
            return bad(format!("Lipschitz constant must be positive, got {}", self.lipschitz));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate < 2.0 / self.lipschitz) {
            return bad(format!(
                "learning rate must lie in (0, 2/L) = (0, {}), got {}",
                2.0 / self.lipschitz,
                self.learning_rate
            ));
        }
        if self.s_min < 2 {
            return bad(format!("s_min must be at least 2, got {}", self.s_min));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return bad(format!("mu must lie in (0, 1), got {}", self.mu));
        }
        if !(self.bias > 0.0 && self.bias.is_finite()) {
            return bad(format!("bias must be positive, got {}", self.bias));
        }
        if self.shot_cap < self.s_min {
            return bad(format!("shot cap {} is below s_min {}", self.shot_cap, self.s_min));
        }
        let floor = self.estimator.shot_floor(h);
        if self.s_min < floor {
            return Err(SamplingError::BelowFloor {
                strategy: match self.estimator {
                    Estimator::Sampled(s) => s.strategy,
                    Estimator::Exact => unreachable!("exact estimates have floor 1"),
                },
                requested: self.s_min,
                floor,
            }
            .into());
        }
        Ok(())
    }
}

/// Mutable state of a Rosalin run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub theta: Vec<f64>,
    pub shots_per_component: Vec<u64>,
    pub chi_prime: Vec<f64>,
    pub xi_prime: Vec<f64>,
    pub k: u64,
    pub shots_used: u64,
}

impl OptimizerState {
    pub fn new(theta0: Vec<f64>, s_min: u64) -> Self {
        let d = theta0.len();
        Self {
            theta: theta0,
            shots_per_component: vec![s_min; d],
            chi_prime: vec![0.0; d],
            xi_prime: vec![0.0; d],
            k: 0,
            shots_used: 0,
        }
    }
}

/// One completed iteration of either optimizer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    /// Zero-based iteration index.
    pub iteration: u64,
    /// Cumulative shots charged after this iteration.
    pub shots_used: u64,
    /// Parameters at the end of the iteration.
    pub theta: Vec<f64>,
    /// Shots per estimate used for each component in this iteration.
    pub shots_per_component: Vec<u64>,
}

/// Every iteration of a run, in order. The starting point is not included.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_theta(&self) -> Option<&[f64]> {
        self.records.last().map(|r| r.theta.as_slice())
    }

    pub fn shots_used(&self) -> u64 {
        self.records.last().map_or(0, |r| r.shots_used)
    }
}

/// `⌈(2Lα/(2−Lα))·ξ/(χ² + bμ^k)⌉`, saturating at `cap`.
pub fn shot_recommendation(lipschitz: f64, alpha: f64, xi: f64, chi: f64, bias_term: f64, cap: u64) -> u64 {
    let la = lipschitz * alpha;
    let raw = 2.0 * la / (2.0 - la) * xi / (chi * chi + bias_term);
    if !raw.is_finite() || raw >= cap as f64 {
        cap
    } else {
        (ceil_tol(raw).max(0.0) as u64).min(cap)
    }
}

/// Expected gain per shot `(1/s)[(α − Lα²/2)χ² − (Lα²/(2s))ξ]`, with `s`
/// raised to at least one.
pub fn expected_gain(lipschitz: f64, alpha: f64, xi: f64, chi: f64, shots: u64) -> f64 {
    let s = shots.max(1) as f64;
    ((alpha - lipschitz * alpha * alpha / 2.0) * chi * chi - lipschitz * alpha * alpha / (2.0 * s) * xi) / s
}

/// Runs one iteration of the Rosalin loop on `state`.
///
/// The iteration is charged `2Σs_ℓ` shots before any gradient is evaluated.
pub fn rosalin_step(
    state: &mut OptimizerState,
    config: &RosalinConfig,
    h: &Hamiltonian,
    circuit: &dyn Ansatz,
    seeds: SeedTree,
) -> Result<IterationRecord, OptimizerError> {
    let d = state.theta.len();
    let charged = state.shots_per_component.clone();
    state.shots_used += 2 * charged.iter().sum::<u64>();

    let mu = config.mu;
    let correction = 1.0 - mu.powi(state.k as i32 + 1);
    let bias_term = config.bias * mu.powi(state.k as i32);
    let alpha = config.learning_rate;
    let lipschitz = config.lipschitz;
    let step_seeds = seeds.child(state.k);

    let mut next_shots = vec![0u64; d];
    let mut gains = vec![0.0; d];
    let mut gradients = vec![0.0; d];
    for l in 0..d {
        let sample = i_evaluate(&state.theta, charged[l], l, h, circuit, &config.estimator, step_seeds.child(l as u64))?;
        state.xi_prime[l] = mu * state.xi_prime[l] + (1.0 - mu) * sample.variance;
        state.chi_prime[l] = mu * state.chi_prime[l] + (1.0 - mu) * sample.gradient;
        let xi = state.xi_prime[l] / correction;
        let chi = state.chi_prime[l] / correction;
        match config.update_order {
            UpdateOrder::Sequential => state.theta[l] -= alpha * sample.gradient,
            UpdateOrder::Simultaneous => gradients[l] = sample.gradient,
        }
        next_shots[l] = shot_recommendation(lipschitz, alpha, xi, chi, bias_term, config.shot_cap);
        gains[l] = expected_gain(lipschitz, alpha, xi, chi, next_shots[l]);
    }
    if config.update_order == UpdateOrder::Simultaneous {
        for (t, g) in state.theta.iter_mut().zip(&gradients) {
            *t -= alpha * g;
        }
    }

    let best = gains
        .iter()
        .enumerate()
        .fold(0, |best, (l, &g)| if g > gains[best] { l } else { best });
    let upper = next_shots[best].max(config.s_min);
    state.shots_per_component = next_shots.iter().map(|&s| s.clamp(config.s_min, upper)).collect();

    let record = IterationRecord {
        iteration: state.k,
        shots_used: state.shots_used,
        theta: state.theta.clone(),
        shots_per_component: charged,
    };
    state.k += 1;
    Ok(record)
}

/// Iterates [`rosalin_step`] until the charged shots reach the budget.
pub fn run_rosalin(
    config: &RosalinConfig,
    h: &Hamiltonian,
    circuit: &dyn Ansatz,
    theta0: &[f64],
    seed: u64,
) -> Result<RunTrace, OptimizerError> {
    config.validate(h)?;
    check_theta(theta0, circuit)?;
    let seeds = SeedTree::new(seed);
    let mut state = OptimizerState::new(theta0.to_vec(), config.s_min);
    let mut trace = RunTrace::default();
    while state.shots_used < config.budget {
        trace.records.push(rosalin_step(&mut state, config, h, circuit, seeds)?);
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub budget: u64,
    pub estimator: Estimator,
    /// Overrides the default `max(100, strategy floor)` shots per expectation.
    #[serde(default)]
    pub shots_per_expectation: Option<u64>,
}

impl AdamConfig {
    /// Step 0.01, `β1 = 0.9`, `β2 = 0.999`, `ε = 1e-8`.
    pub fn new(budget: u64, estimator: Estimator) -> Self {
        Self {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            budget,
            estimator,
            shots_per_expectation: None,
        }
    }

    pub fn validate(&self, h: &Hamiltonian) -> Result<(), OptimizerError> {
        let bad = |msg: String| Err(OptimizerError::InvalidConfig(msg));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return bad(format!("{name} must lie in [0, 1), got {beta}"));
            }
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        let shots = adam_shots_per_expectation(self, h);
        if let Estimator::Sampled(s) = self.estimator {
            let floor = s.strategy.shot_floor(h);
            if shots < floor {
                return Err(SamplingError::BelowFloor { strategy: s.strategy, requested: shots, floor }.into());
            }
        }
        Ok(())
    }
}

/// Shots requested per expectation value: the override if set, otherwise
/// `max(100, strategy floor)`.
pub fn adam_shots_per_expectation(config: &AdamConfig, h: &Hamiltonian) -> u64 {
    config
        .shots_per_expectation
        .unwrap_or_else(|| ADAM_BASE_SHOTS.max(config.estimator.shot_floor(h)))
}

/// Adam over parameter-shift gradients with a fixed shot count per
/// expectation. Each iteration is charged the shots its estimates actually
/// consume, which for UDS and WDS can fall short of the request.
pub fn run_adam(
    config: &AdamConfig,
    h: &Hamiltonian,
    circuit: &dyn Ansatz,
    theta0: &[f64],
    seed: u64,
) -> Result<RunTrace, OptimizerError> {
    config.validate(h)?;
    check_theta(theta0, circuit)?;
    let d = theta0.len();
    let shots = adam_shots_per_expectation(config, h);
    let seeds = SeedTree::new(seed);
    let mut theta = theta0.to_vec();
    let mut m = vec![0.0; d];
    let mut v = vec![0.0; d];
    let mut shots_used = 0u64;
    let mut trace = RunTrace::default();
    let mut k = 0u64;
    while shots_used < config.budget {
        let step_seeds = seeds.child(k);
        let mut grad = vec![0.0; d];
        let mut spent = vec![0u64; d];
        for l in 0..d {
            let plus = circuit.prepare(&shifted(&theta, l, FRAC_PI_2))?;
            let minus = circuit.prepare(&shifted(&theta, l, -FRAC_PI_2))?;
            let (e_plus, e_minus, used) = match &config.estimator {
                Estimator::Exact => (plus.energy(h)?, minus.energy(h)?, shots),
                Estimator::Sampled(sampler) => {
                    let comp = step_seeds.child(l as u64);
                    let e_p = sampler.estimate_energy(h, &plus.term_distributions(h)?, shots, &mut comp.child(0).rng())?;
                    let e_m = sampler.estimate_energy(h, &minus.term_distributions(h)?, shots, &mut comp.child(1).rng())?;
                    let used = match sampler.strategy {
                        Strategy::Uds => allocate_uds(h, shots)?.total(),
                        Strategy::Wds => allocate_wds(h, shots)?.total(),
                        _ => shots,
                    };
                    (e_p, e_m, used)
                }
            };
            grad[l] = (e_plus - e_minus) / 2.0;
            spent[l] = used;
        }
        shots_used += 2 * spent.iter().sum::<u64>();
        let t = (k + 1) as i32;
        let bc1 = 1.0 - config.beta1.powi(t);
        let bc2 = 1.0 - config.beta2.powi(t);
        for l in 0..d {
            m[l] = config.beta1 * m[l] + (1.0 - config.beta1) * grad[l];
            v[l] = config.beta2 * v[l] + (1.0 - config.beta2) * grad[l] * grad[l];
            let m_hat = m[l] / bc1;
            let v_hat = v[l] / bc2;
            theta[l] -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
        }
        trace.records.push(IterationRecord { iteration: k, shots_used, theta: theta.clone(), shots_per_component: spent });
        k += 1;
    }
    Ok(trace)
}
