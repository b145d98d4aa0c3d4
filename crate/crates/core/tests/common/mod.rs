//! Seeded fixtures shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rand::Rng;
use rosalin::hamiltonian::{Hamiltonian, Pauli, PauliString};
use rosalin::seed::SeedTree;
use rosalin::simulator::{AnsatzCircuit, StateVector};

/// Law of the coefficient magnitudes; signs are always uniform.
#[derive(Debug, Clone, Copy)]
pub enum Magnitudes {
    /// Uniform on [0.1, 1].
    Uniform,
    /// Log-uniform on [0.01, 1].
    LogUniform,
    /// `k/4` with `k` uniform in 1..=8 and the first term forced to `k = 1`.
    /// All weighted allocations at multiples of the floor are then integers.
    Quarters,
}

fn distinct_paulis(rng: &mut impl Rng, n_qubits: usize, n_terms: usize) -> Vec<PauliString> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n_terms);
    while out.len() < n_terms {
        let letters: Vec<Pauli> = (0..n_qubits).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]).collect();
        let p = PauliString::new(letters).unwrap();
        if !p.is_identity() && seen.insert(p.to_string()) {
            out.push(p);
        }
    }
    out
}

pub fn random_hamiltonian(seed: u64, n_qubits: usize, n_terms: usize, law: Magnitudes) -> Hamiltonian {
    let mut rng = SeedTree::new(seed).child(1).rng();
    let paulis = distinct_paulis(&mut rng, n_qubits, n_terms);
    let terms = paulis.into_iter().enumerate().map(|(i, p)| {
        let mag = match law {
            Magnitudes::Uniform => rng.random_range(0.1..1.0),
            Magnitudes::LogUniform => 10f64.powf(rng.random_range(-2.0..0.0)),
            Magnitudes::Quarters => if i == 0 { 0.25 } else { rng.random_range(1..=8) as f64 / 4.0 },
        };
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        (sign * mag, p)
    });
    Hamiltonian::from_paulis(n_qubits, terms).unwrap()
}

/// Same as [`random_hamiltonian`] with coefficients rescaled to `Σ|c_i| = 1`.
pub fn unit_norm_hamiltonian(seed: u64, n_qubits: usize, n_terms: usize) -> Hamiltonian {
    let h = random_hamiltonian(seed, n_qubits, n_terms, Magnitudes::Uniform);
    let m = h.one_norm();
    let text: String = h.to_string().lines().map(|line| {
        let (c, p) = line.split_once(' ').unwrap();
        format!("{} {}\n", c.parse::<f64>().unwrap() / m, p)
    }).collect();
    text.parse().unwrap()
}

pub fn random_theta(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = SeedTree::new(seed).child(2).rng();
    (0..count).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

pub fn random_state(seed: u64, n_qubits: usize, depth: usize) -> StateVector {
    let circuit = AnsatzCircuit::new(n_qubits, depth).unwrap();
    circuit.prepare(&random_theta(seed, circuit.parameter_count())).unwrap()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Standard error of the sample variance, `sqrt((μ₄ − σ⁴)/n)` from sample moments.
pub fn variance_stderr(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let m = mean(values);
    let m2 = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2).max(0.0) / n).sqrt()
}
