//! Adam with a fixed shot count per expectation, compared with Rosalin at the
//! same budget.

use rosalin::hamiltonian::Hamiltonian;
use rosalin::optimizer::{run_adam, run_rosalin, AdamConfig, Estimator, RosalinConfig};
use rosalin::sampling::Strategy;
use rosalin::simulator::{exact_ground_energy, AnsatzCircuit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h: Hamiltonian = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/heisenberg3.ham"))?.parse()?;
    let circuit = AnsatzCircuit::new(3, 2)?;
    let ground = exact_ground_energy(&h)?;
    let theta0 = vec![0.4; circuit.parameter_count()];
    let budget = 300_000;
    let delta = |theta: &[f64]| circuit.prepare(theta).and_then(|s| s.energy(&h)).map(|e| e - ground);

    for strategy in [Strategy::Wds, Strategy::Wrs] {
        let trace = run_adam(&AdamConfig::new(budget, Estimator::sampled(strategy)), &h, &circuit, &theta0, 3)?;
        println!("Adam+{strategy}: {} iterations, final ΔE {:.5}", trace.len(), delta(trace.final_theta().unwrap())?);
    }
    let trace = run_rosalin(&RosalinConfig::rosalin1(&h, budget), &h, &circuit, &theta0, 3)?;
    println!("Rosalin1: {} iterations, final ΔE {:.5}", trace.len(), delta(trace.final_theta().unwrap())?);
    Ok(())
}
