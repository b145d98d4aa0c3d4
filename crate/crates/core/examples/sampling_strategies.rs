//! One estimate per strategy at a few budgets, next to the exact energy.

use rosalin::hamiltonian::Hamiltonian;
use rosalin::sampling::{Sampler, Strategy};
use rosalin::seed::SeedTree;
use rosalin::simulator::AnsatzCircuit;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h: Hamiltonian = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/tfim4.ham"))?.parse()?;
    let circuit = AnsatzCircuit::new(4, 1)?;
    let theta: Vec<f64> = (0..circuit.parameter_count()).map(|i| 0.3 * i as f64).collect();
    let state = circuit.prepare(&theta)?;
    let dists = state.term_distributions(&h)?;
    println!("exact energy {:.5}", state.energy(&h)?);

    for s_tot in [1, 4, 10, 100, 10_000] {
        print!("s_tot = {s_tot:>6}:");
        for (i, strategy) in Strategy::ALL.into_iter().enumerate() {
            let mut rng = SeedTree::new(s_tot).child(i as u64).rng();
            match Sampler::new(strategy).estimate(&h, &dists, s_tot, &mut rng) {
                Ok(e) => print!("  {strategy} {:+.4}", e.mean()),
                Err(_) => print!("  {strategy}  (floor)"),
            }
        }
        println!();
    }
    Ok(())
}
