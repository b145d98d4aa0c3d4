//! Rosalin with weighted random sampling on a small Heisenberg chain.

use rosalin::hamiltonian::Hamiltonian;
use rosalin::optimizer::{run_rosalin, RosalinConfig};
use rosalin::simulator::{exact_ground_energy, AnsatzCircuit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h: Hamiltonian = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/heisenberg3.ham"))?.parse()?;
    let circuit = AnsatzCircuit::new(3, 2)?;
    let ground = exact_ground_energy(&h)?;
    let theta0 = vec![0.4; circuit.parameter_count()];
    let config = RosalinConfig::rosalin1(&h, 500_000);

    let trace = run_rosalin(&config, &h, &circuit, &theta0, 7)?;
    let stride = (trace.len() / 10).max(1);
    for r in trace.records.iter().step_by(stride) {
        let e = circuit.prepare(&r.theta)?.energy(&h)?;
        let mean_shots = r.shots_per_component.iter().sum::<u64>() as f64 / r.shots_per_component.len() as f64;
        println!("iter {:>4}  shots {:>8}  ΔE {:.5}  mean s_l {mean_shots:.1}", r.iteration, r.shots_used, e - ground);
    }
    let e = circuit.prepare(trace.final_theta().unwrap())?.energy(&h)?;
    println!("final ΔE {:.5} after {} shots", e - ground, trace.shots_used());
    Ok(())
}
