//! Hamiltonians expressed as weighted sums of directly measurable operators.
//!
//! A measurable operator is either a single [`PauliString`] or a
//! [`CommutingGroup`] of qubit-wise commuting Pauli strings that can be read
//! out with one shot. Letter `k` of a Pauli string acts on qubit `k`, and
//! qubit `k` is bit `k` of a computational basis index.
//!
//! The text format is one term per line, `<coefficient> <letters>`, for
//! example
//!
//! ```text
//! # transverse-field Ising pair
//! -1.0 ZZ
//!  0.5 XI
//!  0.5 IX
//! ```
//!
//! Duplicated strings are merged, the all-identity string becomes an additive
//! constant that is never sampled, and terms are stored by descending `|c_i|`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::numeric::ceil_tol;

/// Merged coefficients smaller than this in magnitude are dropped.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Largest register a Pauli string may act on (bit masks are `u64`).
pub const MAX_PAULI_QUBITS: usize = 64;

/// Largest group support for which the exact norm is enumerated.
pub const MAX_GROUP_SUPPORT: usize = 24;

const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("hamiltonian has no terms")]
    Empty,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: expected {expected} qubits, found {found}")]
    InconsistentQubits { line: usize, expected: usize, found: usize },
    #[error("all coefficients cancel after merging duplicate terms")]
    AllZero,
    #[error("invalid pauli string {0:?}")]
    InvalidPauli(String),
    #[error("operator acts on {found} qubits, hamiltonian has {expected}")]
    QubitMismatch { expected: usize, found: usize },
    #[error("pauli strings {0} and {1} do not commute qubit-wise")]
    NotQubitWiseCommuting(String, String),
    #[error("pauli string {0} appears more than once")]
    DuplicateString(String),
    #[error("coefficient {0} is zero or not finite")]
    BadCoefficient(f64),
    #[error("group support of {0} qubits is too wide for exact norm enumeration")]
    GroupTooWide(usize),
    #[error("grouping requires every term to be a single pauli string")]
    AlreadyGrouped,
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Bit-mask form of a Pauli string: `P|b⟩ = i^{n_y} (-1)^{|b ∧ phase|} |b ⊕ flip⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PauliMasks {
    pub flip: u64,
    pub phase: u64,
    pub n_y: u32,
}

/// Tensor product of single-qubit Pauli operators. Its operator norm is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self, HamiltonianError> {
        if letters.is_empty() || letters.len() > MAX_PAULI_QUBITS {
            return Err(HamiltonianError::InvalidPauli(
                letters.iter().map(|p| p.as_char()).collect(),
            ));
        }
        Ok(Self { letters })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { letters: vec![Pauli::I; n_qubits.max(1)] }
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Bit mask of the qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .fold(0, |m, (q, _)| m | (1 << q))
    }

    /// Letters agree or one of them is `I` on every qubit.
    pub fn qubit_wise_commutes(&self, other: &PauliString) -> bool {
        self.letters.len() == other.letters.len()
            && self
                .letters
                .iter()
                .zip(&other.letters)
                .all(|(&a, &b)| a == b || a == Pauli::I || b == Pauli::I)
    }

    pub(crate) fn masks(&self) -> PauliMasks {
        let mut masks = PauliMasks { flip: 0, phase: 0, n_y: 0 };
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = 1u64 << q;
            match p {
                Pauli::I => {}
                Pauli::X => masks.flip |= bit,
                Pauli::Y => {
                    masks.flip |= bit;
                    masks.phase |= bit;
                    masks.n_y += 1;
                }
                Pauli::Z => masks.phase |= bit,
            }
        }
        masks
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits();
        let m = self.masks();
        let global = Complex64::i().powu(m.n_y);
        DMatrix::from_fn(dim, dim, |row, col| {
            if row as u64 == (col as u64 ^ m.flip) {
                if (col as u64 & m.phase).count_ones().is_multiple_of(2) {
                    global
                } else {
                    -global
                }
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

impl FromStr for PauliString {
    type Err = HamiltonianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| HamiltonianError::InvalidPauli(s.to_string()))?;
        if letters.is_empty() || letters.len() > MAX_PAULI_QUBITS {
            return Err(HamiltonianError::InvalidPauli(s.to_string()));
        }
        Ok(Self { letters })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

/// Weighted sum of pairwise qubit-wise commuting Pauli strings, measured
/// jointly in their shared product eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingGroup {
    members: Vec<(f64, PauliString)>,
    norm: f64,
}

impl CommutingGroup {
    pub fn new(members: Vec<(f64, PauliString)>) -> Result<Self, HamiltonianError> {
        let first = members.first().ok_or(HamiltonianError::Empty)?;
        let n = first.1.n_qubits();
        for (idx, (w, p)) in members.iter().enumerate() {
            if !w.is_finite() || *w == 0.0 {
                return Err(HamiltonianError::BadCoefficient(*w));
            }
            if p.n_qubits() != n {
                return Err(HamiltonianError::QubitMismatch { expected: n, found: p.n_qubits() });
            }
            for (_, q) in &members[..idx] {
                if q == p {
                    return Err(HamiltonianError::DuplicateString(p.to_string()));
                }
                if !q.qubit_wise_commutes(p) {
                    return Err(HamiltonianError::NotQubitWiseCommuting(q.to_string(), p.to_string()));
                }
            }
        }
        let norm = spectral_norm(&members)?;
        if norm <= NORM_TOLERANCE {
            return Err(HamiltonianError::AllZero);
        }
        Ok(Self { members, norm })
    }

    pub fn n_qubits(&self) -> usize {
        self.members[0].1.n_qubits()
    }

    pub fn members(&self) -> &[(f64, PauliString)] {
        &self.members
    }

    /// Spectral norm of `Σ_k w_k P_k`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Per-qubit measurement letter shared by every member (`I` where unused).
    pub fn basis(&self) -> Vec<Pauli> {
        let mut basis = vec![Pauli::I; self.n_qubits()];
        for (_, p) in &self.members {
            for (slot, &letter) in basis.iter_mut().zip(p.letters()) {
                if letter != Pauli::I {
                    *slot = letter;
                }
            }
        }
        basis
    }

    /// Eigenvalue of `Σ_k w_k P_k / norm` on the product eigenstate labelled by
    /// `outcome`, where bit `q` set means eigenvalue `-1` on qubit `q`.
    pub fn outcome_value(&self, outcome: u64) -> f64 {
        weighted_parity(&self.members, outcome) / self.norm
    }

    fn rescaled(&self, factor: f64) -> Self {
        Self {
            members: self.members.iter().map(|(w, p)| (w * factor, p.clone())).collect(),
            norm: self.norm * factor.abs(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.n_qubits();
        let dim = 1usize << n;
        self.members.iter().fold(DMatrix::zeros(dim, dim), |acc, (w, p)| {
            acc + p.to_dense() * Complex64::new(*w, 0.0)
        })
    }
}

fn weighted_parity(members: &[(f64, PauliString)], outcome: u64) -> f64 {
    members
        .iter()
        .map(|(w, p)| {
            if (outcome & p.support()).count_ones().is_multiple_of(2) {
                *w
            } else {
                -*w
            }
        })
        .sum()
}

/// Maximum `|Σ_k w_k λ_k|` over joint eigenvalue assignments on the support.
fn spectral_norm(members: &[(f64, PauliString)]) -> Result<f64, HamiltonianError> {
    let support = members.iter().fold(0u64, |m, (_, p)| m | p.support());
    let qubits: Vec<u32> = (0..64).filter(|q| support >> q & 1 == 1).collect();
    if qubits.len() > MAX_GROUP_SUPPORT {
        return Err(HamiltonianError::GroupTooWide(qubits.len()));
    }
    let mut best = 0.0f64;
    for assignment in 0u64..(1 << qubits.len()) {
        let outcome = qubits
            .iter()
            .enumerate()
            .filter(|(k, _)| assignment >> k & 1 == 1)
            .fold(0u64, |m, (_, &q)| m | (1 << q));
        best = best.max(weighted_parity(members, outcome).abs());
    }
    Ok(best)
}

/// A directly measurable operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Pauli(PauliString),
    Group(CommutingGroup),
}

impl Operator {
    pub fn n_qubits(&self) -> usize {
        match self {
            Operator::Pauli(p) => p.n_qubits(),
            Operator::Group(g) => g.n_qubits(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Operator::Pauli(_) => 1.0,
            Operator::Group(g) => g.norm(),
        }
    }

    pub fn pauli_strings(&self) -> Vec<&PauliString> {
        match self {
            Operator::Pauli(p) => vec![p],
            Operator::Group(g) => g.members().iter().map(|(_, p)| p).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match self {
            Operator::Pauli(p) => p.to_dense(),
            Operator::Group(g) => g.to_dense(),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Pauli(p) => write!(f, "{p}"),
            Operator::Group(g) => {
                write!(f, "{{")?;
                for (k, (w, p)) in g.members().iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{w} {p}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub operator: Operator,
}

impl Term {
    pub fn pauli(coefficient: f64, pauli: PauliString) -> Self {
        Self { coefficient, operator: Operator::Pauli(pauli) }
    }

    pub fn group(coefficient: f64, group: CommutingGroup) -> Self {
        Self { coefficient, operator: Operator::Group(group) }
    }
}

/// `H = constant·I + Σ_i c_i h_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
    constant: f64,
    normalized: bool,
}

impl Hamiltonian {
    /// Builds a Hamiltonian from raw Pauli terms, merging duplicates and
    /// splitting off the identity part as a constant.
    pub fn from_paulis<I>(n_qubits: usize, terms: I) -> Result<Self, HamiltonianError>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        let mut saw_term = false;
        for (c, p) in terms {
            if !c.is_finite() {
                return Err(HamiltonianError::BadCoefficient(c));
            }
            if p.n_qubits() != n_qubits {
                return Err(HamiltonianError::QubitMismatch { expected: n_qubits, found: p.n_qubits() });
            }
            saw_term = true;
            *merged.entry(p).or_insert(0.0) += c;
        }
        if !saw_term {
            return Err(HamiltonianError::Empty);
        }
        let mut constant = 0.0;
        let mut kept = Vec::new();
        for (p, c) in merged {
            if p.is_identity() {
                constant += c;
            } else if c.abs() >= MERGE_TOLERANCE {
                kept.push(Term::pauli(c, p));
            }
        }
        if kept.is_empty() {
            return Err(HamiltonianError::AllZero);
        }
        Self::from_terms(n_qubits, kept, constant)
    }

    /// Builds a Hamiltonian from already-merged terms without normalising.
    pub fn from_terms(n_qubits: usize, mut terms: Vec<Term>, constant: f64) -> Result<Self, HamiltonianError> {
        if terms.is_empty() {
            return Err(HamiltonianError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        for t in &terms {
            if !t.coefficient.is_finite() || t.coefficient == 0.0 {
                return Err(HamiltonianError::BadCoefficient(t.coefficient));
            }
            if t.operator.n_qubits() != n_qubits {
                return Err(HamiltonianError::QubitMismatch { expected: n_qubits, found: t.operator.n_qubits() });
            }
            for p in t.operator.pauli_strings() {
                if !seen.insert(p.clone()) {
                    return Err(HamiltonianError::DuplicateString(p.to_string()));
                }
            }
        }
        terms.sort_by(|a, b| b.coefficient.abs().total_cmp(&a.coefficient.abs()));
        let normalized = terms.iter().all(|t| (t.operator.norm() - 1.0).abs() <= NORM_TOLERANCE);
        Ok(Self { n_qubits, terms, constant, normalized })
    }

    pub fn parse(text: &str) -> Result<Self, HamiltonianError> {
        let mut raw = Vec::new();
        let mut n_qubits = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            let (Some(coef), Some(letters), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(HamiltonianError::Malformed {
                    line: line_no,
                    reason: "expected `<coefficient> <pauli letters>`".into(),
                });
            };
            let c: f64 = coef.parse().map_err(|_| HamiltonianError::Malformed {
                line: line_no,
                reason: format!("bad coefficient {coef:?}"),
            })?;
            if !c.is_finite() {
                return Err(HamiltonianError::Malformed { line: line_no, reason: format!("non-finite coefficient {coef:?}") });
            }
            let p: PauliString = letters.parse().map_err(|_| HamiltonianError::Malformed {
                line: line_no,
                reason: format!("bad pauli string {letters:?}"),
            })?;
            match n_qubits {
                None => n_qubits = Some(p.n_qubits()),
                Some(n) if n != p.n_qubits() => {
                    return Err(HamiltonianError::InconsistentQubits { line: line_no, expected: n, found: p.n_qubits() })
                }
                Some(_) => {}
            }
            raw.push((c, p));
        }
        let n = n_qubits.ok_or(HamiltonianError::Empty)?;
        Self::from_paulis(n, raw)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Number of sampled terms `N` (the identity constant is not a term).
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    /// `M = Σ_i |c_i|`.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Absorbs every operator norm into its coefficient. Idempotent.
    pub fn normalize(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match &t.operator {
                Operator::Pauli(_) => t.clone(),
                Operator::Group(g) => {
                    let norm = g.norm();
                    Term::group(t.coefficient * norm, g.rescaled(1.0 / norm))
                }
            })
            .collect();
        let mut out = Self { n_qubits: self.n_qubits, terms, constant: self.constant, normalized: true };
        out.terms.sort_by(|a, b| b.coefficient.abs().total_cmp(&a.coefficient.abs()));
        out
    }

    /// Sampling probabilities `p_i = |c_i| / M`.
    pub fn probabilities(&self) -> Vec<f64> {
        let m = self.one_norm();
        self.terms.iter().map(|t| t.coefficient.abs() / m).collect()
    }

    /// Smallest budget giving every term at least one weighted deterministic
    /// shot: `⌈M / min_i |c_i|⌉`.
    pub fn shot_floor(&self) -> u64 {
        let min = self.terms.iter().map(|t| t.coefficient.abs()).fold(f64::INFINITY, f64::min);
        ceil_tol(self.one_norm() / min) as u64
    }

    /// First-fit greedy partition into qubit-wise commuting groups, scanning
    /// terms by descending `|c_i|`. The result is normalised.
    pub fn group_qwc_greedy(&self) -> Result<Self, HamiltonianError> {
        let mut groups: Vec<Vec<(f64, PauliString)>> = Vec::new();
        for t in &self.terms {
            let Operator::Pauli(p) = &t.operator else {
                return Err(HamiltonianError::AlreadyGrouped);
            };
            match groups.iter_mut().find(|g| g.iter().all(|(_, q)| q.qubit_wise_commutes(p))) {
                Some(g) => g.push((t.coefficient, p.clone())),
                None => groups.push(vec![(t.coefficient, p.clone())]),
            }
        }
        let terms = groups
            .into_iter()
            .map(|members| CommutingGroup::new(members).map(|g| Term::group(1.0, g)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_terms(self.n_qubits, terms, self.constant)?.normalize())
    }

    /// Dense `2^n × 2^n` matrix including the identity constant.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let base = DMatrix::identity(dim, dim) * Complex64::new(self.constant, 0.0);
        self.terms.iter().fold(base, |acc, t| acc + t.operator.to_dense() * Complex64::new(t.coefficient, 0.0))
    }
}

impl FromStr for Hamiltonian {
    type Err = HamiltonianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for Hamiltonian {
    /// Writes the text format. Grouped terms are expanded back into strings.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constant != 0.0 {
            writeln!(f, "{} {}", self.constant, PauliString::identity(self.n_qubits))?;
        }
        for t in &self.terms {
            match &t.operator {
                Operator::Pauli(p) => writeln!(f, "{} {}", t.coefficient, p)?,
                Operator::Group(g) => {
                    for (w, p) in g.members() {
                        writeln!(f, "{} {}", t.coefficient * w, p)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Independent oracle: largest |eigenvalue| of the dense hermitian matrix.
    fn dense_spectral_norm(m: DMatrix<Complex64>) -> f64 {
        m.symmetric_eigenvalues().iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    #[test]
    fn parse_single_term() {
        let h: Hamiltonian = "1.0 Z\n".parse().unwrap();
        assert_eq!(h.n_terms(), 1);
        assert_eq!(h.n_qubits(), 1);
        assert_eq!(h.one_norm(), 1.0);
    }

    #[test]
    fn parse_merges_duplicates() {
        let h: Hamiltonian = "0.5 ZZ\n0.5 ZZ\n".parse().unwrap();
        assert_eq!(h.n_terms(), 1);
        assert_eq!(h.terms()[0].coefficient, 1.0);
    }

    #[test]
    fn parse_drops_cancelled_terms() {
        let h: Hamiltonian = "0.5 ZI\n-0.5 ZI\n0.3 XX\n".parse().unwrap();
        assert_eq!(h.n_terms(), 1);
        assert_eq!(h.terms()[0], Term::pauli(0.3, ps("XX")));
        assert_eq!(h.one_norm(), 0.3);
    }

    #[test]
    fn parse_handles_comments_and_identity() {
        let text = "# header\n\n  -0.25 II  # constant\n0.5 XZ\n1.5 ZI\n";
        let h: Hamiltonian = text.parse().unwrap();
        assert_eq!(h.constant(), -0.25);
        assert_eq!(h.n_terms(), 2);
        // descending |c|
        assert_eq!(h.terms()[0].coefficient, 1.5);
        assert_eq!(h.one_norm(), 2.0);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Hamiltonian::parse("# nothing\n\n"), Err(HamiltonianError::Empty));
        assert!(matches!(Hamiltonian::parse("1.0 Z\nfoo ZZ\n"), Err(HamiltonianError::Malformed { line: 2, .. })));
        assert!(matches!(Hamiltonian::parse("1.0 Z\n0.5 ZQ\n"), Err(HamiltonianError::Malformed { line: 2, .. })));
        assert!(matches!(Hamiltonian::parse("1.0\n"), Err(HamiltonianError::Malformed { line: 1, .. })));
        assert!(matches!(Hamiltonian::parse("1.0 Z X\n"), Err(HamiltonianError::Malformed { line: 1, .. })));
        assert_eq!(
            Hamiltonian::parse("1.0 ZZ\n0.5 Z\n"),
            Err(HamiltonianError::InconsistentQubits { line: 2, expected: 2, found: 1 })
        );
        assert_eq!(Hamiltonian::parse("1.0 XY\n-1.0 XY\n"), Err(HamiltonianError::AllZero));
        assert_eq!(Hamiltonian::parse("2.0 II\n"), Err(HamiltonianError::AllZero));
    }

    #[test]
    fn display_round_trips_through_parse() {
        let h: Hamiltonian = "0.7 II\n-1.25 ZX\n0.5 YY\n".parse().unwrap();
        let again: Hamiltonian = h.to_string().parse().unwrap();
        assert_eq!(h, again);
    }

    #[test]
    fn normalize_leaves_paulis_alone() {
        let h = Hamiltonian::from_paulis(2, [(2.0, ps("XZ"))]).unwrap();
        assert!(h.is_normalized());
        assert_eq!(h.normalize(), h);
    }

    #[test]
    fn normalize_unit_norm_group() {
        let g = CommutingGroup::new(vec![(0.5, ps("ZI")), (0.5, ps("IZ"))]).unwrap();
        let oracle = dense_spectral_norm(g.to_dense());
        assert!((oracle - 1.0).abs() < 1e-12);
        assert!((g.norm() - oracle).abs() < 1e-12);
        let h = Hamiltonian::from_terms(2, vec![Term::group(1.0, g)], 0.0).unwrap().normalize();
        assert!((h.terms()[0].coefficient - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_absorbs_group_norm() {
        let g = CommutingGroup::new(vec![(1.0, ps("ZI")), (1.0, ps("IZ"))]).unwrap();
        assert!((dense_spectral_norm(g.to_dense()) - 2.0).abs() < 1e-12);
        let raw = Hamiltonian::from_terms(2, vec![Term::group(0.5, g)], 0.0).unwrap();
        assert!(!raw.is_normalized());
        let h = raw.normalize();
        assert!(h.is_normalized());
        assert!((h.terms()[0].coefficient - 1.0).abs() < 1e-12);
        let Operator::Group(g) = &h.terms()[0].operator else { panic!() };
        assert!((g.norm() - 1.0).abs() < 1e-12);
        assert!(g.members().iter().all(|(w, _)| (w - 0.5).abs() < 1e-12));
        assert!(max_abs_diff(&raw.to_dense(), &h.to_dense()) < 1e-12);
    }

    #[test]
    fn group_norm_matches_dense_with_mixed_bases() {
        let g = CommutingGroup::new(vec![(0.7, ps("XZI")), (-0.4, ps("XIY")), (0.2, ps("IZY")), (0.9, ps("XZY"))]).unwrap();
        assert!((g.norm() - dense_spectral_norm(g.to_dense())).abs() < 1e-12);
        assert_eq!(g.basis(), vec![Pauli::X, Pauli::Z, Pauli::Y]);
    }

    #[test]
    fn group_rejects_non_commuting_members() {
        let err = CommutingGroup::new(vec![(1.0, ps("XI")), (1.0, ps("ZI"))]).unwrap_err();
        assert!(matches!(err, HamiltonianError::NotQubitWiseCommuting(..)));
    }

    #[test]
    fn probabilities_examples() {
        let h = Hamiltonian::from_paulis(1, [(0.5, ps("Z")), (0.3, ps("X")), (0.2, ps("Y"))]).unwrap();
        let p = h.probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.3).abs() < 1e-15 && (p[2] - 0.2).abs() < 1e-15);
        let h = Hamiltonian::from_paulis(1, [(1.0, ps("Z")), (-1.0, ps("X"))]).unwrap();
        assert_eq!(h.probabilities(), vec![0.5, 0.5]);
        let h = Hamiltonian::from_paulis(1, [(3.0, ps("Z")), (1.0, ps("X"))]).unwrap();
        assert_eq!(h.probabilities(), vec![0.75, 0.25]);
    }

    #[test]
    fn shot_floor_examples() {
        let h = Hamiltonian::from_paulis(1, [(0.5, ps("Z")), (0.3, ps("X")), (0.2, ps("Y"))]).unwrap();
        assert_eq!(h.shot_floor(), 5);
        let h = Hamiltonian::from_paulis(1, [(1.0, ps("Z"))]).unwrap();
        assert_eq!(h.shot_floor(), 1);
        let h = Hamiltonian::from_paulis(1, [(1.0, ps("Z")), (0.01, ps("X"))]).unwrap();
        assert_eq!(h.shot_floor(), 101);
    }

    fn group_strings(h: &Hamiltonian) -> Vec<Vec<String>> {
        h.terms()
            .iter()
            .map(|t| match &t.operator {
                Operator::Group(g) => g.members().iter().map(|(_, p)| p.to_string()).collect(),
                Operator::Pauli(_) => panic!("expected groups"),
            })
            .collect()
    }

    #[test]
    fn greedy_grouping_examples() {
        let h = Hamiltonian::from_paulis(2, [(0.9, ps("ZI")), (0.8, ps("IZ")), (0.7, ps("XX"))]).unwrap();
        assert_eq!(group_strings(&h.group_qwc_greedy().unwrap()), vec![vec!["ZI", "IZ"], vec!["XX"]]);

        let h = Hamiltonian::from_paulis(1, [(0.4, ps("Z"))]).unwrap();
        let g = h.group_qwc_greedy().unwrap();
        assert_eq!(group_strings(&g), vec![vec!["Z"]]);
        assert!((g.terms()[0].coefficient - 0.4).abs() < 1e-15);

        let h = Hamiltonian::from_paulis(
            2,
            [(1.0, ps("ZZ")), (0.9, ps("ZI")), (0.8, ps("IZ")), (0.7, ps("XX")), (0.6, ps("XI"))],
        )
        .unwrap();
        let g = h.group_qwc_greedy().unwrap();
        assert_eq!(group_strings(&g), vec![vec!["ZZ", "ZI", "IZ"], vec!["XX", "XI"]]);
        assert!(g.group_qwc_greedy().is_err());
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        proptest::collection::vec(0u8..4, n).prop_map(|v| {
            PauliString::new(v.into_iter().map(|k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize]).collect())
                .unwrap()
        })
    }

    fn arb_raw_terms() -> impl Strategy<Value = (usize, Vec<(f64, PauliString)>)> {
        (1usize..=3).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec((-2.0f64..2.0, arb_pauli(n)), 1..12))
        })
    }

    proptest! {
        #[test]
        fn merging_preserves_dense_matrix((n, raw) in arb_raw_terms()) {
            let dim = 1usize << n;
            let direct = raw.iter().fold(DMatrix::<Complex64>::zeros(dim, dim), |acc, (c, p)| {
                acc + p.to_dense() * Complex64::new(*c, 0.0)
            });
            if let Ok(h) = Hamiltonian::from_paulis(n, raw.clone()) {
                let scale = direct.iter().map(|z| z.norm()).fold(1.0, f64::max);
                prop_assert!(max_abs_diff(&h.to_dense(), &direct) <= 1e-12 * scale);
                let normalized = h.normalize();
                prop_assert_eq!(&normalized, &normalized.normalize());
                prop_assert!(max_abs_diff(&normalized.to_dense(), &direct) <= 1e-12 * scale);
            }
        }

        #[test]
        fn grouping_preserves_matrix_and_commutation((n, raw) in arb_raw_terms()) {
            if let Ok(h) = Hamiltonian::from_paulis(n, raw) {
                let g = h.group_qwc_greedy().unwrap();
                prop_assert!(g.is_normalized());
                prop_assert!(max_abs_diff(&g.to_dense(), &h.to_dense()) <= 1e-11);
                for t in g.terms() {
                    let Operator::Group(group) = &t.operator else { unreachable!() };
                    for (a, (_, p)) in group.members().iter().enumerate() {
                        for (_, q) in &group.members()[..a] {
                            prop_assert!(p.qubit_wise_commutes(q));
                        }
                    }
                    prop_assert!((group.norm() - dense_spectral_norm(group.to_dense())).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn probabilities_are_scale_invariant((n, raw) in arb_raw_terms(), scale in 0.01f64..100.0) {
            if let Ok(h) = Hamiltonian::from_paulis(n, raw.clone()) {
                let p = h.probabilities();
                prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                prop_assert!(p.iter().all(|&x| x > 0.0));
                let scaled = Hamiltonian::from_paulis(n, raw.into_iter().map(|(c, s)| (c * scale, s))).unwrap();
                for (a, b) in p.iter().zip(scaled.probabilities()) {
                    prop_assert!((a - b).abs() <= 1e-12);
                }
            }
        }
    }
}
