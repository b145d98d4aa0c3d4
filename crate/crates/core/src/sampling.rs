//! Shot allocation strategies and the single-shot energy estimator.
//!
//! Every strategy splits a budget `s_tot` into per-term shot counts `s_i`
//! with `E[s_i] > 0`, and the estimator
//!
//! ```text
//! Ê = Σ_i c_i / E[s_i] · Σ_j r_ij
//! ```
//!
//! is unbiased for `⟨H⟩`. [`estimate_h`] returns one entry per shot, scaled so
//! that the arithmetic mean of the entries equals `Ê`; the optimizer pairs
//! those entries to form per-shot gradient samples.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::numeric::floor_tol;
use crate::simulator::{Ansatz, OutcomeDistribution, SimulatorError, StateVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("{strategy} needs at least {floor} shots, got {requested}")]
    BelowFloor { strategy: Strategy, requested: u64, floor: u64 },
    #[error("shot budget must be positive")]
    NoShots,
    #[error("hamiltonian must be normalised before sampling")]
    NotNormalized,
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
}

/// The five allocation strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Uniform deterministic: `⌊s_tot/N⌋` shots per term.
    Uds,
    /// Weighted deterministic: `⌊s_tot |c_i|/M⌋` shots per term.
    Wds,
    /// Weighted random: multinomial with `p_i = |c_i|/M`.
    Wrs,
    /// Weighted hybrid: deterministic floors, remainder drawn at random.
    Whs,
    /// Weighted single: one term drawn with `p_i`, all shots spent on it.
    Wss,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [Strategy::Uds, Strategy::Wds, Strategy::Wrs, Strategy::Whs, Strategy::Wss];

    pub fn is_deterministic(self) -> bool {
        matches!(self, Strategy::Uds | Strategy::Wds)
    }

    /// Smallest budget the strategy accepts.
    pub fn shot_floor(self, h: &Hamiltonian) -> u64 {
        match self {
            Strategy::Uds => h.n_terms() as u64,
            Strategy::Wds => h.shot_floor(),
            Strategy::Wrs | Strategy::Whs | Strategy::Wss => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Uds => "uds",
            Strategy::Wds => "wds",
            Strategy::Wrs => "wrs",
            Strategy::Whs => "whs",
            Strategy::Wss => "wss",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown strategy {s:?} (expected uds, wds, wrs, whs or wss)"))
    }
}

/// How shots of the weighted hybrid strategy are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HybridWeighting {
    /// Divide by the exact `E[s_i] = ⌊p_i s_tot⌋ + p_i s_rand`; unbiased.
    #[default]
    ExpectedShots,
    /// Weight every shot by `c_i/p_i`, ignoring the floor correction.
    Proportional,
}

/// Term-selection law of the weighted single strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleSelection {
    #[default]
    Weighted,
    Uniform,
}

/// Realised per-term shot counts together with their expectations.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotAllocation {
    shots: Vec<u64>,
    expected_shots: Vec<f64>,
    random_shots: u64,
}

impl ShotAllocation {
    pub fn shots(&self) -> &[u64] {
        &self.shots
    }

    /// `E[s_i]`, strictly positive for every term.
    pub fn expected_shots(&self) -> &[f64] {
        &self.expected_shots
    }

    /// Shots assigned at random (`s_rand`); zero for deterministic strategies.
    pub fn random_shots(&self) -> u64 {
        self.random_shots
    }

    /// Shots actually spent, `Σ_i s_i`.
    pub fn total(&self) -> u64 {
        self.shots.iter().sum()
    }
}

/// Draws `Multinomial(n, probs)` by sequential binomial conditioning.
pub fn draw_multinomial<R: Rng + ?Sized>(n: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass: f64 = probs.iter().sum();
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = if q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q).expect("probability in (0,1)").sample(rng)
        };
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    counts
}

fn require_normalized(h: &Hamiltonian) -> Result<(), SamplingError> {
    if h.is_normalized() {
        Ok(())
    } else {
        Err(SamplingError::NotNormalized)
    }
}

fn require_shots(s_tot: u64) -> Result<(), SamplingError> {
    if s_tot == 0 {
        Err(SamplingError::NoShots)
    } else {
        Ok(())
    }
}

fn weighted_floors(h: &Hamiltonian, s_tot: u64) -> Vec<u64> {
    h.probabilities().iter().map(|p| floor_tol(p * s_tot as f64) as u64).collect()
}

pub fn allocate_uds(h: &Hamiltonian, s_tot: u64) -> Result<ShotAllocation, SamplingError> {
    require_normalized(h)?;
    let n = h.n_terms() as u64;
    if s_tot < n {
        return Err(SamplingError::BelowFloor { strategy: Strategy::Uds, requested: s_tot, floor: n });
    }
    let per_term = s_tot / n;
    Ok(ShotAllocation {
        shots: vec![per_term; n as usize],
        expected_shots: vec![per_term as f64; n as usize],
        random_shots: 0,
    })
}

pub fn allocate_wds(h: &Hamiltonian, s_tot: u64) -> Result<ShotAllocation, SamplingError> {
    require_normalized(h)?;
    let floor = h.shot_floor();
    let shots = weighted_floors(h, s_tot);
    if s_tot < floor || shots.contains(&0) {
        return Err(SamplingError::BelowFloor { strategy: Strategy::Wds, requested: s_tot, floor });
    }
    let expected_shots = shots.iter().map(|&s| s as f64).collect();
    Ok(ShotAllocation { shots, expected_shots, random_shots: 0 })
}

pub fn draw_wrs<R: Rng + ?Sized>(h: &Hamiltonian, s_tot: u64, rng: &mut R) -> Result<ShotAllocation, SamplingError> {
    require_normalized(h)?;
    require_shots(s_tot)?;
    let p = h.probabilities();
    Ok(ShotAllocation {
        shots: draw_multinomial(s_tot, &p, rng),
        expected_shots: p.iter().map(|pi| pi * s_tot as f64).collect(),
        random_shots: s_tot,
    })
}

/// `s_rand` of the hybrid strategy: the leftover after weighted floors when
/// every floor is positive, otherwise the whole budget.
pub fn whs_random_shots(h: &Hamiltonian, s_tot: u64) -> u64 {
    let floors = weighted_floors(h, s_tot);
    if s_tot >= h.shot_floor() && !floors.contains(&0) {
        s_tot - floors.iter().sum::<u64>()
    } else {
        s_tot
    }
}

pub fn draw_whs<R: Rng + ?Sized>(h: &Hamiltonian, s_tot: u64, rng: &mut R) -> Result<ShotAllocation, SamplingError> {
    require_normalized(h)?;
    require_shots(s_tot)?;
    let p = h.probabilities();
    let s_rand = whs_random_shots(h, s_tot);
    let deterministic = if s_rand == s_tot { vec![0; p.len()] } else { weighted_floors(h, s_tot) };
    let extra = draw_multinomial(s_rand, &p, rng);
    Ok(ShotAllocation {
        shots: deterministic.iter().zip(&extra).map(|(d, e)| d + e).collect(),
        expected_shots: deterministic.iter().zip(&p).map(|(&d, pi)| d as f64 + pi * s_rand as f64).collect(),
        random_shots: s_rand,
    })
}

fn single_probabilities(h: &Hamiltonian, selection: SingleSelection) -> Vec<f64> {
    match selection {
        SingleSelection::Weighted => h.probabilities(),
        SingleSelection::Uniform => vec![1.0 / h.n_terms() as f64; h.n_terms()],
    }
}

pub fn draw_wss<R: Rng + ?Sized>(h: &Hamiltonian, s_tot: u64, rng: &mut R) -> Result<ShotAllocation, SamplingError> {
    draw_single(h, s_tot, SingleSelection::Weighted, rng)
}

fn draw_single<R: Rng + ?Sized>(
    h: &Hamiltonian,
    s_tot: u64,
    selection: SingleSelection,
    rng: &mut R,
) -> Result<ShotAllocation, SamplingError> {
    require_normalized(h)?;
    require_shots(s_tot)?;
    let p = single_probabilities(h, selection);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let chosen = p
        .iter()
        .position(|pi| {
            acc += pi;
            u < acc
        })
        .unwrap_or(p.len() - 1);
    let mut shots = vec![0; p.len()];
    shots[chosen] = s_tot;
    Ok(ShotAllocation {
        shots,
        expected_shots: p.iter().map(|pi| pi * s_tot as f64).collect(),
        random_shots: s_tot,
    })
}

/// Exact first and second moments of the shot counts a strategy produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotStatistics {
    pub expected_shots: Vec<f64>,
    pub covariance: DMatrix<f64>,
}

/// `s_tot·(diag(p) − p pᵀ)`.
pub fn multinomial_covariance(probs: &[f64], s_tot: f64) -> DMatrix<f64> {
    let n = probs.len();
    DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { probs[i] } else { 0.0 };
        s_tot * (diag - probs[i] * probs[j])
    })
}

/// A configured strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampler {
    pub strategy: Strategy,
    #[serde(default)]
    pub hybrid_weighting: HybridWeighting,
    #[serde(default)]
    pub single_selection: SingleSelection,
}

impl Sampler {
    pub fn new(strategy: Strategy) -> Self {
        Self { strategy, hybrid_weighting: HybridWeighting::default(), single_selection: SingleSelection::default() }
    }

    pub fn with_hybrid_weighting(mut self, weighting: HybridWeighting) -> Self {
        self.hybrid_weighting = weighting;
        self
    }

    pub fn with_single_selection(mut self, selection: SingleSelection) -> Self {
        self.single_selection = selection;
        self
    }

    pub fn allocate<R: Rng + ?Sized>(&self, h: &Hamiltonian, s_tot: u64, rng: &mut R) -> Result<ShotAllocation, SamplingError> {
        match self.strategy {
            Strategy::Uds => allocate_uds(h, s_tot),
            Strategy::Wds => allocate_wds(h, s_tot),
            Strategy::Wrs => draw_wrs(h, s_tot, rng),
            Strategy::Whs => draw_whs(h, s_tot, rng),
            Strategy::Wss => draw_single(h, s_tot, self.single_selection, rng),
        }
    }

    /// Per-shot multiplier `m_i` such that a shot of term `i` contributes
    /// `c_i·r·m_i` to the entry vector, whose mean is then `Ê`.
    fn shot_weights(&self, h: &Hamiltonian, allocation: &ShotAllocation) -> Vec<f64> {
        let total = allocation.total() as f64;
        let proportional = self.strategy == Strategy::Whs
            && self.hybrid_weighting == HybridWeighting::Proportional;
        if proportional {
            h.probabilities().iter().map(|p| 1.0 / p).collect()
        } else {
            allocation.expected_shots().iter().map(|e| total / e).collect()
        }
    }

    /// Single-shot estimates of `⟨H⟩` for the state whose per-term outcome
    /// laws are `distributions`. The identity constant is added to every entry.
    pub fn estimate<R: Rng + ?Sized>(
        &self,
        h: &Hamiltonian,
        distributions: &[OutcomeDistribution],
        s_tot: u64,
        rng: &mut R,
    ) -> Result<EstimateVector, SamplingError> {
        let allocation = self.allocate(h, s_tot, rng)?;
        let weights = self.shot_weights(h, &allocation);
        let mut entries = Vec::with_capacity(allocation.total() as usize);
        for (((term, dist), &shots), w) in h.terms().iter().zip(distributions).zip(allocation.shots()).zip(&weights) {
            let scale = term.coefficient * w;
            for _ in 0..shots {
                entries.push(h.constant() + scale * dist.sample(rng));
            }
        }
        Ok(EstimateVector { entries })
    }

    /// `Ê` alone, drawing per-term outcome counts instead of individual shots.
    /// Same law as the mean of [`Sampler::estimate`], at `O(N)` cost in `s_tot`.
    pub fn estimate_energy<R: Rng + ?Sized>(
        &self,
        h: &Hamiltonian,
        distributions: &[OutcomeDistribution],
        s_tot: u64,
        rng: &mut R,
    ) -> Result<f64, SamplingError> {
        let allocation = self.allocate(h, s_tot, rng)?;
        let weights = self.shot_weights(h, &allocation);
        let total = allocation.total() as f64;
        let mut sum = 0.0;
        for (((term, dist), &shots), w) in h.terms().iter().zip(distributions).zip(allocation.shots()).zip(&weights) {
            if shots == 0 {
                continue;
            }
            let counts = draw_multinomial(shots, dist.probabilities(), rng);
            let outcome_sum: f64 = counts.iter().zip(dist.values()).map(|(&k, v)| k as f64 * v).sum();
            sum += term.coefficient * w * outcome_sum;
        }
        Ok(h.constant() + sum / total)
    }

    /// Exact `E[s_i]` and `Cov[s_i, s_i']` of the allocation at budget `s_tot`.
    pub fn shot_statistics(&self, h: &Hamiltonian, s_tot: u64) -> Result<ShotStatistics, SamplingError> {
        require_normalized(h)?;
        require_shots(s_tot)?;
        let n = h.n_terms();
        let s = s_tot as f64;
        Ok(match self.strategy {
            Strategy::Uds | Strategy::Wds => {
                let alloc = if self.strategy == Strategy::Uds { allocate_uds(h, s_tot)? } else { allocate_wds(h, s_tot)? };
                ShotStatistics { expected_shots: alloc.expected_shots, covariance: DMatrix::zeros(n, n) }
            }
            Strategy::Wrs => {
                let p = h.probabilities();
                ShotStatistics { expected_shots: p.iter().map(|pi| pi * s).collect(), covariance: multinomial_covariance(&p, s) }
            }
            Strategy::Whs => {
                let p = h.probabilities();
                let s_rand = whs_random_shots(h, s_tot);
                let det = if s_rand == s_tot { vec![0; n] } else { weighted_floors(h, s_tot) };
                ShotStatistics {
                    expected_shots: det.iter().zip(&p).map(|(&d, pi)| d as f64 + pi * s_rand as f64).collect(),
                    covariance: multinomial_covariance(&p, s_rand as f64),
                }
            }
            Strategy::Wss => {
                let p = single_probabilities(h, self.single_selection);
                ShotStatistics {
                    expected_shots: p.iter().map(|pi| pi * s).collect(),
                    covariance: multinomial_covariance(&p, 1.0) * (s * s),
                }
            }
        })
    }
}

/// Single-shot estimates whose arithmetic mean is the energy estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateVector {
    entries: Vec<f64>,
}

impl EstimateVector {
    pub fn from_entries(entries: Vec<f64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.entries.iter().sum::<f64>() / self.entries.len() as f64
    }
}

/// Prepares the ansatz state at `theta` and returns single-shot estimates of
/// `⟨H⟩` under `sampler`.
pub fn estimate_h<R: Rng + ?Sized>(
    theta: &[f64],
    s_tot: u64,
    sampler: &Sampler,
    h: &Hamiltonian,
    circuit: &dyn Ansatz,
    rng: &mut R,
) -> Result<EstimateVector, SamplingError> {
    let state = circuit.prepare(theta)?;
    estimate_on_state(&state, s_tot, sampler, h, rng)
}

pub fn estimate_on_state<R: Rng + ?Sized>(
    state: &StateVector,
    s_tot: u64,
    sampler: &Sampler,
    h: &Hamiltonian,
    rng: &mut R,
) -> Result<EstimateVector, SamplingError> {
    let distributions = state.term_distributions(h)?;
    sampler.estimate(h, &distributions, s_tot, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::SeedTree;
    use crate::simulator::StateVector;

    fn h(text: &str) -> Hamiltonian {
        text.parse().unwrap()
    }

    fn three_terms() -> Hamiltonian {
        h("0.5 Z\n0.3 X\n0.2 Y\n")
    }

    fn four_terms() -> Hamiltonian {
        h("0.4 ZI\n0.3 IZ\n0.2 XX\n0.1 YY\n")
    }

    #[test]
    fn uds_examples() {
        let a = allocate_uds(&four_terms(), 10).unwrap();
        assert_eq!(a.shots(), &[2, 2, 2, 2]);
        assert_eq!(a.total(), 8);
        assert_eq!(allocate_uds(&h("1.0 Z"), 7).unwrap().shots(), &[7]);
        assert_eq!(
            allocate_uds(&four_terms(), 3),
            Err(SamplingError::BelowFloor { strategy: Strategy::Uds, requested: 3, floor: 4 })
        );
    }

    #[test]
    fn wds_examples() {
        assert_eq!(allocate_wds(&three_terms(), 10).unwrap().shots(), &[5, 3, 2]);
        assert_eq!(
            allocate_wds(&three_terms(), 4),
            Err(SamplingError::BelowFloor { strategy: Strategy::Wds, requested: 4, floor: 5 })
        );
        assert_eq!(allocate_wds(&h("1.0 Z"), 5).unwrap().shots(), &[5]);
        // Floors are pure functions of their inputs.
        assert_eq!(allocate_wds(&three_terms(), 17), allocate_wds(&three_terms(), 17));
    }

    #[test]
    fn wrs_examples() {
        let mut rng = SeedTree::new(3).rng();
        for _ in 0..50 {
            let a = draw_wrs(&four_terms(), 1, &mut rng).unwrap();
            assert_eq!(a.total(), 1);
            assert_eq!(a.shots().iter().filter(|&&s| s == 1).count(), 1);
        }
        let a = draw_wrs(&h("0.5 Z\n0.5 X"), 100_000, &mut rng).unwrap();
        let tol = 5.0 * (100_000f64 * 0.25).sqrt();
        assert!(a.shots().iter().all(|&s| (s as f64 - 50_000.0).abs() <= tol));
        assert_eq!(draw_wrs(&h("1.0 Z"), 37, &mut rng).unwrap().shots(), &[37]);
        assert_eq!(draw_wrs(&h("1.0 Z"), 0, &mut rng), Err(SamplingError::NoShots));
    }

    #[test]
    fn whs_examples() {
        let mut rng = SeedTree::new(4).rng();
        let hh = three_terms();
        let below = draw_whs(&hh, 4, &mut rng).unwrap();
        assert_eq!(below.random_shots(), 4);
        assert_eq!(below.total(), 4);
        let exact = draw_whs(&hh, 10, &mut rng).unwrap();
        assert_eq!((exact.shots(), exact.random_shots()), (&[5u64, 3, 2][..], 0));
        let mixed = draw_whs(&hh, 7, &mut rng).unwrap();
        assert_eq!(mixed.random_shots(), 1);
        assert_eq!(mixed.total(), 7);
        for (s, d) in mixed.shots().iter().zip([3u64, 2, 1]) {
            assert!(*s == d || *s == d + 1);
        }
        let e = mixed.expected_shots();
        assert!((e[0] - 3.5).abs() < 1e-12 && (e[1] - 2.3).abs() < 1e-12 && (e[2] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn whs_without_remainder_equals_wds() {
        let hh = four_terms();
        for s_tot in [10u64, 20, 30, 100] {
            let mut rng = SeedTree::new(s_tot).rng();
            let whs = draw_whs(&hh, s_tot, &mut rng).unwrap();
            assert_eq!(whs.random_shots(), 0);
            assert_eq!(whs, allocate_wds(&hh, s_tot).unwrap());
        }
    }

    #[test]
    fn wss_examples() {
        let mut rng = SeedTree::new(5).rng();
        for _ in 0..20 {
            let a = draw_wss(&four_terms(), 20, &mut rng).unwrap();
            assert_eq!(a.shots().iter().filter(|&&s| s != 0).collect::<Vec<_>>(), vec![&20]);
        }
        assert_eq!(draw_wss(&h("1.0 Z"), 9, &mut rng).unwrap().shots(), &[9]);
        let trials = 100_000;
        let hh = h("0.9 Z\n0.1 X");
        let first = (0..trials).filter(|_| draw_wss(&hh, 3, &mut rng).unwrap().shots()[0] == 3).count();
        assert!((first as f64 - 90_000.0).abs() <= 5.0 * (trials as f64 * 0.09).sqrt());
    }

    #[test]
    fn estimate_examples() {
        let z = h("1.0 Z");
        let zero = StateVector::zero_state(1).unwrap();
        let mut rng = SeedTree::new(6).rng();
        for strategy in Strategy::ALL {
            let e = estimate_on_state(&zero, 5, &Sampler::new(strategy), &z, &mut rng).unwrap();
            assert_eq!(e.entries(), &[1.0; 5]);
        }

        let pair = h("0.5 ZI\n0.5 IZ");
        let zz = StateVector::zero_state(2).unwrap();
        for _ in 0..10 {
            let e = estimate_on_state(&zz, 1, &Sampler::new(Strategy::Wrs), &pair, &mut rng).unwrap();
            assert_eq!(e.entries(), &[1.0]);
        }

        let mut plus = StateVector::zero_state(1).unwrap();
        plus.apply_hadamard(0);
        let e = estimate_on_state(&plus, 100_000, &Sampler::new(Strategy::Wrs), &z, &mut rng).unwrap();
        assert!(e.mean().abs() <= 5.0 / 100_000f64.sqrt());
    }

    #[test]
    fn constant_shifts_every_entry() {
        let hh = h("2.0 II\n0.5 ZI\n0.5 IZ");
        let zz = StateVector::zero_state(2).unwrap();
        let mut rng = SeedTree::new(7).rng();
        let e = estimate_on_state(&zz, 4, &Sampler::new(Strategy::Uds), &hh, &mut rng).unwrap();
        assert_eq!(e.entries(), &[3.0; 4]);
    }

    #[test]
    fn deterministic_estimates_use_realised_shots() {
        // UDS at s_tot = 7 over three terms spends 2 shots each, so a term-0
        // entry on |0⟩ is c·r·s_eff/s_i = 0.5·1·6/2.
        let zero = StateVector::zero_state(1).unwrap();
        let mut rng = SeedTree::new(8).rng();
        let e = estimate_on_state(&zero, 7, &Sampler::new(Strategy::Uds), &three_terms(), &mut rng).unwrap();
        assert_eq!(e.len(), 6);
        assert!((e.entries()[0] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn shot_statistics_match_allocation_definitions() {
        let hh = three_terms();
        let stats = Sampler::new(Strategy::Whs).shot_statistics(&hh, 7).unwrap();
        assert!((stats.expected_shots.iter().sum::<f64>() - 7.0).abs() < 1e-12);
        assert!((stats.covariance[(0, 0)] - 0.25).abs() < 1e-12);
        let wss = Sampler::new(Strategy::Wss).shot_statistics(&hh, 10).unwrap();
        assert!((wss.covariance[(0, 1)] + 100.0 * 0.15).abs() < 1e-12);
        assert!(Sampler::new(Strategy::Wds).shot_statistics(&hh, 4).is_err());
    }

    #[test]
    fn multinomial_conserves_total() {
        let mut rng = SeedTree::new(9).rng();
        let probs = [0.1, 0.0, 0.6, 0.3];
        for n in [0u64, 1, 2, 17, 1000] {
            let counts = draw_multinomial(n, &probs, &mut rng);
            assert_eq!(counts.iter().sum::<u64>(), n);
            assert_eq!(counts[1], 0);
        }
    }

    #[test]
    fn unnormalized_hamiltonian_is_rejected() {
        use crate::hamiltonian::{CommutingGroup, Term};
        let g = CommutingGroup::new(vec![(1.0, "ZI".parse().unwrap()), (1.0, "IZ".parse().unwrap())]).unwrap();
        let raw = Hamiltonian::from_terms(2, vec![Term::group(1.0, g)], 0.0).unwrap();
        let mut rng = SeedTree::new(0).rng();
        assert_eq!(draw_wrs(&raw, 3, &mut rng), Err(SamplingError::NotNormalized));
        assert!(draw_wrs(&raw.normalize(), 3, &mut rng).is_ok());
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.to_string().parse::<Strategy>(), Ok(s));
        }
        assert_eq!("WHS".parse::<Strategy>(), Ok(Strategy::Whs));
        assert!("abc".parse::<Strategy>().is_err());
    }
}
