//! Closed-form variances of the energy estimator.
//!
//! All formulas take exact per-term moments, so they serve as analytic
//! references for sampled estimates. The identity constant of a Hamiltonian
//! does not enter: `⟨H⟩` below always means `Σ c_i⟨h_i⟩`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::hamiltonian::Hamiltonian;
use crate::numeric::floor_tol;
use crate::simulator::{SimulatorError, StateVector};

/// Default lower bound on `σ_i` for the prior-σ formulas.
pub const DEFAULT_SIGMA_MIN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarianceError {
    #[error("expected shot count of term {term} is {value}, must be positive")]
    NonPositiveExpectedShots { term: usize, value: f64 },
    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch { what: &'static str, expected: usize, found: usize },
    #[error("shot budget must be positive")]
    NoShots,
    #[error("sigma of term {term} is {sigma}, below the regulariser {sigma_min}")]
    SigmaTooSmall { term: usize, sigma: f64, sigma_min: f64 },
    #[error(transparent)]
    Simulator(#[from] SimulatorError),
}

/// Exact per-term moments `⟨h_i⟩` and `⟨h_i²⟩` in one state.
#[derive(Debug, Clone, PartialEq)]
pub struct TermMoments {
    expectations: Vec<f64>,
    second_moments: Vec<f64>,
}

impl TermMoments {
    pub fn new(expectations: Vec<f64>, second_moments: Vec<f64>) -> Result<Self, VarianceError> {
        if expectations.len() != second_moments.len() {
            return Err(VarianceError::LengthMismatch {
                what: "second_moments",
                expected: expectations.len(),
                found: second_moments.len(),
            });
        }
        Ok(Self { expectations, second_moments })
    }

    /// Moments of Pauli strings, whose squares are the identity.
    pub fn pauli(expectations: Vec<f64>) -> Self {
        let second_moments = vec![1.0; expectations.len()];
        Self { expectations, second_moments }
    }

    pub fn from_state(state: &StateVector, h: &Hamiltonian) -> Result<Self, VarianceError> {
        let mut expectations = Vec::with_capacity(h.n_terms());
        let mut second_moments = Vec::with_capacity(h.n_terms());
        for term in h.terms() {
            expectations.push(state.expectation(&term.operator)?);
            second_moments.push(state.second_moment(&term.operator)?);
        }
        Ok(Self { expectations, second_moments })
    }

    pub fn len(&self) -> usize {
        self.expectations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expectations.is_empty()
    }

    pub fn expectations(&self) -> &[f64] {
        &self.expectations
    }

    pub fn second_moments(&self) -> &[f64] {
        &self.second_moments
    }

    /// `σ_i² = ⟨h_i²⟩ − ⟨h_i⟩²`, clamped at zero against round-off.
    pub fn sigma_sq(&self) -> Vec<f64> {
        self.expectations.iter().zip(&self.second_moments).map(|(e, m)| (m - e * e).max(0.0)).collect()
    }

    /// `Σ c_i⟨h_i⟩`.
    pub fn energy(&self, c: &[f64]) -> f64 {
        c.iter().zip(&self.expectations).map(|(c, e)| c * e).sum()
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), VarianceError> {
    if expected == found {
        Ok(())
    } else {
        Err(VarianceError::LengthMismatch { what, expected, found })
    }
}

fn check_shots(s_tot: f64) -> Result<(), VarianceError> {
    if s_tot > 0.0 {
        Ok(())
    } else {
        Err(VarianceError::NoShots)
    }
}

fn one_norm(c: &[f64]) -> f64 {
    c.iter().map(|x| x.abs()).sum()
}

/// Variance of the estimator for arbitrary shot statistics:
/// `Σ c_i²σ_i²/E[s_i] + Σ_{i,i'} c_i c_i' ⟨h_i⟩⟨h_i'⟩ Cov[s_i,s_i'] / (E[s_i]E[s_i'])`.
pub fn var_general(
    c: &[f64],
    moments: &TermMoments,
    expected_shots: &[f64],
    shot_covariance: &DMatrix<f64>,
) -> Result<f64, VarianceError> {
    let n = c.len();
    check_len("moments", n, moments.len())?;
    check_len("expected_shots", n, expected_shots.len())?;
    check_len("shot_covariance", n, shot_covariance.nrows())?;
    check_len("shot_covariance", n, shot_covariance.ncols())?;
    if let Some((term, &value)) = expected_shots.iter().enumerate().find(|(_, &e)| e.is_nan() || e <= 0.0) {
        return Err(VarianceError::NonPositiveExpectedShots { term, value });
    }
    let sigma_sq = moments.sigma_sq();
    let weighted: Vec<f64> = (0..n).map(|i| c[i] * moments.expectations[i] / expected_shots[i]).collect();
    let direct: f64 = (0..n).map(|i| c[i] * c[i] * sigma_sq[i] / expected_shots[i]).sum();
    let mut cross = 0.0;
    for i in 0..n {
        for j in 0..n {
            cross += weighted[i] * weighted[j] * shot_covariance[(i, j)];
        }
    }
    Ok((direct + cross).max(0.0))
}

/// `(N/s_tot)·Σ c_i²σ_i²`.
pub fn var_uds(c: &[f64], moments: &TermMoments, s_tot: f64) -> Result<f64, VarianceError> {
    check_len("moments", c.len(), moments.len())?;
    check_shots(s_tot)?;
    let sum: f64 = c.iter().zip(moments.sigma_sq()).map(|(c, s)| c * c * s).sum();
    Ok(c.len() as f64 / s_tot * sum)
}

/// `(M/s_tot)·Σ|c_i|σ_i²`.
pub fn var_wds(c: &[f64], moments: &TermMoments, s_tot: f64) -> Result<f64, VarianceError> {
    check_len("moments", c.len(), moments.len())?;
    check_shots(s_tot)?;
    let sum: f64 = c.iter().zip(moments.sigma_sq()).map(|(c, s)| c.abs() * s).sum();
    Ok(one_norm(c) / s_tot * sum)
}

/// `(M/s_tot)·Σ|c_i|⟨h_i²⟩ − ⟨H⟩²/s_tot`.
pub fn var_wrs(c: &[f64], moments: &TermMoments, s_tot: f64) -> Result<f64, VarianceError> {
    check_len("moments", c.len(), moments.len())?;
    check_shots(s_tot)?;
    let sum: f64 = c.iter().zip(&moments.second_moments).map(|(c, m)| c.abs() * m).sum();
    let energy = moments.energy(c);
    Ok(((one_norm(c) * sum - energy * energy) / s_tot).max(0.0))
}

/// WDS variance plus `(s_rand·M/s_tot²)·Σ|c_i|⟨h_i⟩² − s_rand⟨H⟩²/s_tot²`.
pub fn var_whs(c: &[f64], moments: &TermMoments, s_tot: f64, s_rand: f64) -> Result<f64, VarianceError> {
    let base = var_wds(c, moments, s_tot)?;
    Ok(base + s_rand / (s_tot * s_tot) * excess(c, moments))
}

/// `(M/s_tot)·Σ|c_i|σ_i² + M Σ|c_i|⟨h_i⟩² − ⟨H⟩²`.
pub fn var_wss(c: &[f64], moments: &TermMoments, s_tot: f64) -> Result<f64, VarianceError> {
    Ok(var_wds(c, moments, s_tot)? + wss_floor(c, moments))
}

/// `M Σ|c_i|⟨h_i⟩² − ⟨H⟩²`, non-negative by Cauchy–Schwarz.
fn excess(c: &[f64], moments: &TermMoments) -> f64 {
    let sum: f64 = c.iter().zip(&moments.expectations).map(|(c, e)| c.abs() * e * e).sum();
    let energy = moments.energy(c);
    (one_norm(c) * sum - energy * energy).max(0.0)
}

/// Limit of the single-term variance as `s_tot → ∞`.
pub fn wss_floor(c: &[f64], moments: &TermMoments) -> f64 {
    excess(c, moments)
}

/// How the prior-σ formulas treat small `σ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaRegularization {
    /// Raise every `σ_i` to at least `σ_min`.
    Clamp(f64),
    /// Reject any `σ_i` at or below zero.
    Disabled,
}

impl Default for SigmaRegularization {
    fn default() -> Self {
        SigmaRegularization::Clamp(DEFAULT_SIGMA_MIN)
    }
}

impl SigmaRegularization {
    fn apply(self, sigmas: &[f64]) -> Result<Vec<f64>, VarianceError> {
        match self {
            SigmaRegularization::Clamp(sigma_min) => Ok(sigmas.iter().map(|s| s.max(sigma_min)).collect()),
            SigmaRegularization::Disabled => match sigmas.iter().enumerate().find(|(_, &s)| s.is_nan() || s <= 0.0) {
                Some((term, &sigma)) => Err(VarianceError::SigmaTooSmall { term, sigma, sigma_min: 0.0 }),
                None => Ok(sigmas.to_vec()),
            },
        }
    }
}

fn prior_weights(c: &[f64], sigmas: &[f64]) -> (Vec<f64>, f64) {
    let weights: Vec<f64> = c.iter().zip(sigmas).map(|(c, s)| c.abs() * s).collect();
    let total = weights.iter().sum();
    (weights, total)
}

/// Deterministic allocation `s_i = ⌊s_tot|c_i|σ_i / Σ|c_i'|σ_i'⌋` that minimises
/// the variance when the `σ_i` are known in advance.
pub fn allocate_prior_sigma(
    c: &[f64],
    sigmas: &[f64],
    s_tot: u64,
    regularization: SigmaRegularization,
) -> Result<Vec<u64>, VarianceError> {
    check_len("sigmas", c.len(), sigmas.len())?;
    check_shots(s_tot as f64)?;
    let sigmas = regularization.apply(sigmas)?;
    let (weights, total) = prior_weights(c, &sigmas);
    Ok(weights.iter().map(|w| floor_tol(s_tot as f64 * w / total) as u64).collect())
}

/// `(Σ|c_i|σ_i)²/s_tot`, the variance of the prior-σ allocation.
pub fn var_prior_sigma_deterministic(c: &[f64], moments: &TermMoments, s_tot: f64) -> Result<f64, VarianceError> {
    check_len("moments", c.len(), moments.len())?;
    check_shots(s_tot)?;
    let weighted: f64 = c.iter().zip(moments.sigma_sq()).map(|(c, s)| c.abs() * s.sqrt()).sum();
    Ok(weighted * weighted / s_tot)
}

/// Variance of random sampling with `p_i ∝ |c_i|σ_i`:
/// `(Σ|c_i'|σ_i'/s_tot)·Σ|c_i|⟨h_i²⟩/σ_i − ⟨H⟩²/s_tot`.
pub fn var_prior_sigma_random(
    c: &[f64],
    moments: &TermMoments,
    s_tot: f64,
    regularization: SigmaRegularization,
) -> Result<f64, VarianceError> {
    check_len("moments", c.len(), moments.len())?;
    check_shots(s_tot)?;
    let sigmas: Vec<f64> = moments.sigma_sq().iter().map(|s| s.sqrt()).collect();
    let sigmas = match regularization {
        SigmaRegularization::Clamp(sigma_min) => {
            if let Some((term, &sigma)) = sigmas.iter().enumerate().find(|(_, &s)| s < sigma_min) {
                return Err(VarianceError::SigmaTooSmall { term, sigma, sigma_min });
            }
            sigmas
        }
        SigmaRegularization::Disabled => regularization.apply(&sigmas)?,
    };
    let (_, total) = prior_weights(c, &sigmas);
    let sum: f64 = c
        .iter()
        .zip(&moments.second_moments)
        .zip(&sigmas)
        .map(|((c, m), s)| c.abs() * m / s)
        .sum();
    let energy = moments.energy(c);
    Ok((total * sum - energy * energy) / s_tot)
}
