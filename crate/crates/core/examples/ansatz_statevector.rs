//! Prepare a layered ansatz state and compare exact term moments with
//! sampled shots.

use rand::Rng;
use rosalin::hamiltonian::Hamiltonian;
use rosalin::seed::SeedTree;
use rosalin::simulator::AnsatzCircuit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h: Hamiltonian = "-1.0 ZZI\n-1.0 IZZ\n-0.5 XII\n-0.5 IXI\n-0.5 IIX".parse()?;
    let circuit = AnsatzCircuit::new(3, 2)?;
    let mut rng = SeedTree::new(1).rng();
    let theta: Vec<f64> = (0..circuit.parameter_count()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let state = circuit.prepare(&theta)?;

    println!("{} parameters, energy {:.6}", circuit.parameter_count(), state.energy(&h)?);
    for term in h.terms() {
        let dist = state.outcome_distribution(&term.operator)?;
        let shots = 2000;
        let sampled: f64 = (0..shots).map(|_| dist.sample(&mut rng)).sum::<f64>() / shots as f64;
        println!(
            "  {}: <h> = {:+.4}, variance {:.4}, mean of {shots} shots {:+.4}",
            term.operator,
            state.expectation(&term.operator)?,
            state.quantum_variance(&term.operator)?,
            sampled
        );
    }
    Ok(())
}
