//! Parse a Hamiltonian, inspect its sampling statistics and group
//! qubit-wise commuting terms.

use rosalin::hamiltonian::Hamiltonian;
use rosalin::simulator::{exact_ground_energy, spectrum_bounds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/skewed4.ham").into());
    let h: Hamiltonian = std::fs::read_to_string(&path)?.parse()?;

    println!("{path}: {} qubits, {} terms, constant {}", h.n_qubits(), h.n_terms(), h.constant());
    println!("one-norm M = {:.4}, weighted shot floor = {}", h.one_norm(), h.shot_floor());
    for (t, p) in h.terms().iter().zip(h.probabilities()) {
        println!("  {:>8.4}  p = {p:.4}  {}", t.coefficient, t.operator);
    }

    let grouped = h.group_qwc_greedy()?;
    println!("QWC grouping: {} terms -> {} groups, M {:.4} -> {:.4}", h.n_terms(), grouped.n_terms(), h.one_norm(), grouped.one_norm());

    let (lo, hi) = spectrum_bounds(&h)?;
    println!("ground energy {:.6}, spectrum [{lo:.4}, {hi:.4}]", exact_ground_energy(&h)?);
    Ok(())
}
