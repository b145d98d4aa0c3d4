//! Statevector simulation of the layered rotation ansatz.
//!
//! The ansatz starts from `|0…0⟩`, applies one layer of general single-qubit
//! unitaries `U = Rz(a)·Ry(b)·Rz(c)`, then repeats `depth` times a CNOT
//! ladder on `(0,1), (1,2), …` followed by another `U` layer. Parameters are
//! laid out layer by layer, qubit by qubit, as `(a, b, c)` triples.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::hamiltonian::{CommutingGroup, Hamiltonian, Operator, Pauli, PauliString};

/// Largest register the dense ground-energy oracle accepts.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Largest register a statevector may hold.
pub const MAX_STATE_QUBITS: usize = 24;

const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulatorError {
    #[error("expected {expected} parameters, got {found}")]
    ParameterCount { expected: usize, found: usize },
    #[error("operator acts on {found} qubits, state has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{0} qubits exceed the dense diagonalisation limit of {MAX_DENSE_QUBITS}")]
    TooLargeForDense(usize),
    #[error("unsupported register size {0}")]
    BadQubitCount(usize),
    #[error("amplitudes have squared norm {0}, expected 1")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

type Gate = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rz(angle: f64) -> Gate {
    let half = angle / 2.0;
    [[Complex64::from_polar(1.0, -half), c(0.0, 0.0)], [c(0.0, 0.0), Complex64::from_polar(1.0, half)]]
}

fn ry(angle: f64) -> Gate {
    let (s, co) = (angle / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

fn hadamard() -> Gate {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
}

fn s_dagger() -> Gate {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]
}

impl StateVector {
    pub fn zero_state(n_qubits: usize) -> Result<Self, SimulatorError> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS {
            return Err(SimulatorError::BadQubitCount(n_qubits));
        }
        let mut amplitudes = vec![c(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = c(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self, SimulatorError> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS || amplitudes.len() != 1 << n_qubits {
            return Err(SimulatorError::BadQubitCount(n_qubits));
        }
        let state = Self { n_qubits, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimulatorError::NotNormalized(norm));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn apply_gate(&mut self, qubit: usize, g: &Gate) {
        let bit = 1usize << qubit;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                self.amplitudes[i] = g[0][0] * a0 + g[0][1] * a1;
                self.amplitudes[i | bit] = g[1][0] * a0 + g[1][1] * a1;
            }
        }
    }

    pub fn apply_rz(&mut self, qubit: usize, angle: f64) {
        self.apply_gate(qubit, &rz(angle));
    }

    pub fn apply_ry(&mut self, qubit: usize, angle: f64) {
        self.apply_gate(qubit, &ry(angle));
    }

    pub fn apply_hadamard(&mut self, qubit: usize) {
        self.apply_gate(qubit, &hadamard());
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amplitudes.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amplitudes.swap(i, i | tb);
            }
        }
    }

    fn check(&self, n: usize) -> Result<(), SimulatorError> {
        if n == self.n_qubits {
            Ok(())
        } else {
            Err(SimulatorError::DimensionMismatch { expected: self.n_qubits, found: n })
        }
    }

    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64, SimulatorError> {
        self.check(p.n_qubits())?;
        let m = p.masks();
        let mut acc = c(0.0, 0.0);
        for (b, amp) in self.amplitudes.iter().enumerate() {
            let term = self.amplitudes[b ^ m.flip as usize].conj() * amp;
            if (b as u64 & m.phase).count_ones().is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Ok((acc * Complex64::i().powu(m.n_y)).re)
    }

    /// `⟨ψ|h|ψ⟩` for the operator scaled to unit norm.
    pub fn expectation(&self, op: &Operator) -> Result<f64, SimulatorError> {
        match op {
            Operator::Pauli(p) => self.pauli_expectation(p),
            Operator::Group(g) => {
                self.check(g.n_qubits())?;
                let sum = g
                    .members()
                    .iter()
                    .map(|(w, p)| self.pauli_expectation(p).map(|e| w * e))
                    .sum::<Result<f64, _>>()?;
                Ok(sum / g.norm())
            }
        }
    }

    /// `⟨h²⟩` for the unit-norm operator; exactly 1 for a Pauli string.
    pub fn second_moment(&self, op: &Operator) -> Result<f64, SimulatorError> {
        match op {
            Operator::Pauli(p) => {
                self.check(p.n_qubits())?;
                Ok(1.0)
            }
            Operator::Group(_) => Ok(self.outcome_distribution(op)?.second_moment()),
        }
    }

    /// `σ² = ⟨h²⟩ − ⟨h⟩²`, clamped at zero against round-off.
    pub fn quantum_variance(&self, op: &Operator) -> Result<f64, SimulatorError> {
        let e = self.expectation(op)?;
        Ok((self.second_moment(op)? - e * e).max(0.0))
    }

    /// Exact `⟨H⟩` including the identity constant.
    pub fn energy(&self, h: &Hamiltonian) -> Result<f64, SimulatorError> {
        h.terms().iter().try_fold(h.constant(), |acc, t| {
            Ok(acc + t.coefficient * self.expectation(&t.operator)?)
        })
    }

    /// Single-shot outcome law of the unit-norm operator.
    pub fn outcome_distribution(&self, op: &Operator) -> Result<OutcomeDistribution, SimulatorError> {
        match op {
            Operator::Pauli(p) => {
                let e = self.pauli_expectation(p)?.clamp(-1.0, 1.0);
                Ok(OutcomeDistribution::new(vec![1.0, -1.0], vec![(1.0 + e) / 2.0, (1.0 - e) / 2.0]))
            }
            Operator::Group(g) => {
                self.check(g.n_qubits())?;
                Ok(self.group_distribution(g))
            }
        }
    }

    fn group_distribution(&self, g: &CommutingGroup) -> OutcomeDistribution {
        let mut rotated = self.clone();
        for (q, letter) in g.basis().into_iter().enumerate() {
            match letter {
                Pauli::X => rotated.apply_hadamard(q),
                Pauli::Y => {
                    rotated.apply_gate(q, &s_dagger());
                    rotated.apply_hadamard(q);
                }
                Pauli::Z | Pauli::I => {}
            }
        }
        let (values, probs) = rotated
            .amplitudes
            .iter()
            .enumerate()
            .map(|(b, a)| (g.outcome_value(b as u64), a.norm_sqr()))
            .filter(|&(_, p)| p > 0.0)
            .unzip();
        OutcomeDistribution::new(values, probs)
    }

    pub fn sample_shot<R: Rng + ?Sized>(&self, op: &Operator, rng: &mut R) -> Result<ShotOutcome, SimulatorError> {
        Ok(ShotOutcome(self.outcome_distribution(op)?.sample(rng)))
    }

    /// Outcome laws for every term of `h`, in term order.
    pub fn term_distributions(&self, h: &Hamiltonian) -> Result<Vec<OutcomeDistribution>, SimulatorError> {
        h.terms().iter().map(|t| self.outcome_distribution(&t.operator)).collect()
    }
}

/// Value of one projective measurement of a unit-norm operator, in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ShotOutcome(pub f64);

impl ShotOutcome {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Discrete law over measurement values.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl OutcomeDistribution {
    fn new(values: Vec<f64>, probs: Vec<f64>) -> Self {
        let total: f64 = probs.iter().sum();
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let cumulative = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Self { values, probs, cumulative }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v * v * p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.values[idx.min(self.values.len() - 1)]
    }
}

/// Layered `Rz·Ry·Rz` ansatz with CNOT-ladder entanglers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzCircuit {
    n_qubits: usize,
    depth: usize,
}

impl AnsatzCircuit {
    pub fn new(n_qubits: usize, depth: usize) -> Result<Self, SimulatorError> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS {
            return Err(SimulatorError::BadQubitCount(n_qubits));
        }
        Ok(Self { n_qubits, depth })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `3·n·(D+1)`.
    pub fn parameter_count(&self) -> usize {
        3 * self.n_qubits * (self.depth + 1)
    }

    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector, SimulatorError> {
        if theta.len() != self.parameter_count() {
            return Err(SimulatorError::ParameterCount { expected: self.parameter_count(), found: theta.len() });
        }
        let mut state = StateVector::zero_state(self.n_qubits)?;
        for (layer, angles) in theta.chunks(3 * self.n_qubits).enumerate() {
            if layer > 0 {
                for q in 0..self.n_qubits - 1 {
                    state.apply_cnot(q, q + 1);
                }
            }
            for (q, abc) in angles.chunks(3).enumerate() {
                state.apply_rz(q, abc[2]);
                state.apply_ry(q, abc[1]);
                state.apply_rz(q, abc[0]);
            }
        }
        Ok(state)
    }
}

impl Ansatz for AnsatzCircuit {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn parameter_count(&self) -> usize {
        AnsatzCircuit::parameter_count(self)
    }

    fn prepare(&self, theta: &[f64]) -> Result<StateVector, SimulatorError> {
        AnsatzCircuit::prepare(self, theta)
    }
}

/// A parameterised state preparation starting from `|0…0⟩`.
pub trait Ansatz: Send + Sync {
    fn n_qubits(&self) -> usize;
    fn parameter_count(&self) -> usize;
    fn prepare(&self, theta: &[f64]) -> Result<StateVector, SimulatorError>;
}

/// One `Ry(θ_q)` per qubit, no entanglers. Its energy under `Z` on one qubit
/// is `cos θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RyCircuit {
    n_qubits: usize,
}

impl RyCircuit {
    pub fn new(n_qubits: usize) -> Result<Self, SimulatorError> {
        if n_qubits == 0 || n_qubits > MAX_STATE_QUBITS {
            return Err(SimulatorError::BadQubitCount(n_qubits));
        }
        Ok(Self { n_qubits })
    }
}

impl Ansatz for RyCircuit {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn parameter_count(&self) -> usize {
        self.n_qubits
    }

    fn prepare(&self, theta: &[f64]) -> Result<StateVector, SimulatorError> {
        if theta.len() != self.n_qubits {
            return Err(SimulatorError::ParameterCount { expected: self.n_qubits, found: theta.len() });
        }
        let mut state = StateVector::zero_state(self.n_qubits)?;
        for (q, &t) in theta.iter().enumerate() {
            state.apply_ry(q, t);
        }
        Ok(state)
    }
}

fn dense_eigenvalues(h: &Hamiltonian) -> Result<Vec<f64>, SimulatorError> {
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(SimulatorError::TooLargeForDense(h.n_qubits()));
    }
    let m: DMatrix<Complex64> = h.to_dense();
    Ok(m.symmetric_eigenvalues().iter().copied().collect())
}

/// Smallest eigenvalue of the dense matrix of `h`.
pub fn exact_ground_energy(h: &Hamiltonian) -> Result<f64, SimulatorError> {
    Ok(dense_eigenvalues(h)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// `(λ_min, λ_max)` of `h`.
pub fn spectrum_bounds(h: &Hamiltonian) -> Result<(f64, f64), SimulatorError> {
    let ev = dense_eigenvalues(h)?;
    Ok(ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::SeedTree;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::PI;

    fn op(s: &str) -> Operator {
        Operator::Pauli(s.parse().unwrap())
    }

    fn pair_group() -> Operator {
        Operator::Group(CommutingGroup::new(vec![(0.5, "ZI".parse().unwrap()), (0.5, "IZ".parse().unwrap())]).unwrap())
    }

    fn plus_state() -> StateVector {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_hadamard(0);
        s
    }

    /// Dense reference: `⟨ψ|A|ψ⟩` by matrix-vector product.
    fn dense_expectation(state: &StateVector, a: &DMatrix<Complex64>) -> Complex64 {
        let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
        (psi.adjoint() * a * &psi)[(0, 0)]
    }

    #[test]
    fn ansatz_identity_and_flip() {
        let one = AnsatzCircuit::new(1, 0).unwrap();
        assert_eq!(one.prepare(&[0.0, 0.0, 0.0]).unwrap(), StateVector::zero_state(1).unwrap());
        let flipped = one.prepare(&[0.0, PI, 0.0]).unwrap();
        assert!(flipped.amplitudes()[0].norm() < 1e-15);
        assert!((flipped.amplitudes()[1].norm() - 1.0).abs() < 1e-15);

        let two = AnsatzCircuit::new(2, 1).unwrap();
        assert_eq!(two.parameter_count(), 12);
        assert_eq!(two.prepare(&[0.0; 12]).unwrap(), StateVector::zero_state(2).unwrap());
        assert_eq!(
            two.prepare(&[0.0; 5]),
            Err(SimulatorError::ParameterCount { expected: 12, found: 5 })
        );
    }

    #[test]
    fn cnot_ladder_entangles() {
        // Ry(π/2) on qubit 0 then a CNOT gives a Bell pair: ⟨ZZ⟩ = 1, ⟨ZI⟩ = 0.
        let circuit = AnsatzCircuit::new(2, 1).unwrap();
        let mut theta = vec![0.0; 12];
        theta[1] = PI / 2.0;
        let s = circuit.prepare(&theta).unwrap();
        assert!((s.pauli_expectation(&"ZZ".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!(s.pauli_expectation(&"ZI".parse().unwrap()).unwrap().abs() < 1e-12);
        assert!((s.pauli_expectation(&"XX".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let zero = StateVector::zero_state(1).unwrap();
        assert_eq!(zero.expectation(&op("Z")).unwrap(), 1.0);
        assert!(plus_state().expectation(&op("Z")).unwrap().abs() < 1e-15);
        let zz = StateVector::zero_state(2).unwrap();
        assert!((zz.expectation(&pair_group()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            zero.expectation(&op("ZZ")),
            Err(SimulatorError::DimensionMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn variance_examples() {
        let zero = StateVector::zero_state(1).unwrap();
        assert_eq!(zero.quantum_variance(&op("Z")).unwrap(), 0.0);
        assert!((plus_state().quantum_variance(&op("Z")).unwrap() - 1.0).abs() < 1e-15);
        let zz = StateVector::zero_state(2).unwrap();
        assert!(zz.quantum_variance(&pair_group()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn deterministic_shots() {
        let mut rng = SeedTree::new(1).rng();
        let zero = StateVector::zero_state(1).unwrap();
        let one = AnsatzCircuit::new(1, 0).unwrap().prepare(&[0.0, PI, 0.0]).unwrap();
        for _ in 0..100 {
            assert_eq!(zero.sample_shot(&op("Z"), &mut rng).unwrap().value(), 1.0);
            assert_eq!(one.sample_shot(&op("Z"), &mut rng).unwrap().value(), -1.0);
        }
    }

    #[test]
    fn plus_state_shot_mean() {
        let mut rng = SeedTree::new(2).rng();
        let n = 100_000;
        let s = plus_state();
        let mean: f64 = (0..n).map(|_| s.sample_shot(&op("Z"), &mut rng).unwrap().value()).sum::<f64>() / n as f64;
        assert!(mean.abs() < 5.0 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn ground_energy_examples() {
        let h: Hamiltonian = "1.0 Z".parse().unwrap();
        assert!((exact_ground_energy(&h).unwrap() + 1.0).abs() < 1e-12);
        let h: Hamiltonian = "0.5 ZZ\n0.5 XI".parse().unwrap();
        assert!((exact_ground_energy(&h).unwrap() + 0.5f64.sqrt()).abs() < 1e-12);
        let h: Hamiltonian = "1.0 ZI\n1.0 IZ".parse().unwrap();
        assert!((exact_ground_energy(&h).unwrap() + 2.0).abs() < 1e-12);
        let h: Hamiltonian = "1.5 II\n1.0 ZI\n1.0 IZ".parse().unwrap();
        assert_eq!(spectrum_bounds(&h).map(|(lo, hi)| ((lo + 0.5).abs() < 1e-12, (hi - 3.5).abs() < 1e-12)), Ok((true, true)));
        let big = Hamiltonian::parse(&format!("1.0 {}", "Z".repeat(13))).unwrap();
        assert_eq!(exact_ground_energy(&big), Err(SimulatorError::TooLargeForDense(13)));
    }

    #[test]
    fn pauli_expectation_matches_dense_for_all_letters() {
        let circuit = AnsatzCircuit::new(3, 1).unwrap();
        let theta: Vec<f64> = (0..circuit.parameter_count()).map(|k| 0.37 * k as f64 + 0.1).collect();
        let s = circuit.prepare(&theta).unwrap();
        for text in ["XYZ", "YYI", "IZX", "ZZZ", "YXY"] {
            let p: PauliString = text.parse().unwrap();
            let dense = dense_expectation(&s, &p.to_dense());
            assert!(dense.im.abs() < 1e-12);
            assert!((s.pauli_expectation(&p).unwrap() - dense.re).abs() < 1e-12, "{text}");
        }
    }

    fn arb_theta(n: usize, depth: usize) -> impl proptest::strategy::Strategy<Value = Vec<f64>> {
        proptest::collection::vec(0.0..2.0 * PI, 3 * n * (depth + 1))
    }

    proptest! {
        #[test]
        fn ansatz_preserves_norm(theta in arb_theta(3, 2)) {
            let s = AnsatzCircuit::new(3, 2).unwrap().prepare(&theta).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn group_routes_agree(theta in arb_theta(3, 1), w in proptest::collection::vec(-1.0f64..1.0, 4)) {
            let s = AnsatzCircuit::new(3, 1).unwrap().prepare(&theta).unwrap();
            let members: Vec<(f64, PauliString)> = ["XZI", "XIY", "IZY", "XZY"]
                .iter()
                .zip(&w)
                .filter(|(_, w)| w.abs() > 1e-3)
                .map(|(p, w)| (*w, p.parse().unwrap()))
                .collect();
            prop_assume!(!members.is_empty());
            let g = CommutingGroup::new(members).unwrap();
            let operator = Operator::Group(g.clone());
            // member-sum route vs rotated-basis distribution route vs dense matrix
            let by_members = s.expectation(&operator).unwrap();
            let dist = s.outcome_distribution(&operator).unwrap();
            prop_assert!((by_members - dist.mean()).abs() < 1e-10);
            let dense = g.to_dense() / Complex64::new(g.norm(), 0.0);
            prop_assert!((dense_expectation(&s, &dense).re - by_members).abs() < 1e-10);
            prop_assert!((dense_expectation(&s, &(&dense * &dense)).re - dist.second_moment()).abs() < 1e-10);
            prop_assert!(by_members.abs() <= 1.0 + 1e-12);
            prop_assert!(dist.values().iter().all(|v| v.abs() <= 1.0 + 1e-12));
        }

        #[test]
        fn variational_bound(theta in arb_theta(2, 1)) {
            let h: Hamiltonian = "0.8 ZZ\n-0.3 XI\n0.45 IY\n0.2 XX\n0.1 II".parse().unwrap();
            let s = AnsatzCircuit::new(2, 1).unwrap().prepare(&theta).unwrap();
            prop_assert!(exact_ground_energy(&h).unwrap() <= s.energy(&h).unwrap() + 1e-12);
        }
    }

    #[test]
    fn sampled_moments_match_exact() {
        let circuit = AnsatzCircuit::new(3, 1).unwrap();
        let ops = [
            op("XYZ"),
            op("ZIZ"),
            Operator::Group(
                CommutingGroup::new(vec![(0.6, "XZI".parse().unwrap()), (-0.8, "XIY".parse().unwrap()), (0.3, "IZY".parse().unwrap())])
                    .unwrap(),
            ),
        ];
        let n = 200_000;
        for seed in 0..3u64 {
            let theta: Vec<f64> = {
                let mut rng = SeedTree::new(seed).child(99).rng();
                (0..circuit.parameter_count()).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
            };
            let s = circuit.prepare(&theta).unwrap();
            for (k, o) in ops.iter().enumerate() {
                let mut rng = SeedTree::new(seed).child(k as u64).rng();
                let draws: Vec<f64> = (0..n).map(|_| s.sample_shot(o, &mut rng).unwrap().value()).collect();
                let mean = draws.iter().sum::<f64>() / n as f64;
                let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                let exact = s.expectation(o).unwrap();
                let sigma_sq = s.quantum_variance(o).unwrap();
                assert!((mean - exact).abs() <= 5.0 * (sigma_sq / n as f64).sqrt() + 1e-12, "seed {seed} op {k}");
                if sigma_sq >= 0.1 {
                    assert!((var - sigma_sq).abs() <= 0.05 * sigma_sq, "seed {seed} op {k}: {var} vs {sigma_sq}");
                }
            }
        }
    }
}
