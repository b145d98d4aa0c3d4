//! Shot allocation from prior standard deviations, which minimises the
//! deterministic variance when the priors are right.

use rosalin::hamiltonian::Hamiltonian;
use rosalin::simulator::AnsatzCircuit;
use rosalin::variance::{allocate_prior_sigma, var_prior_sigma_deterministic, var_uds, var_wds, SigmaRegularization, TermMoments};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h: Hamiltonian = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/tfim4.ham"))?.parse()?;
    let circuit = AnsatzCircuit::new(4, 1)?;
    let theta: Vec<f64> = (0..circuit.parameter_count()).map(|i| 0.2 + 0.1 * i as f64).collect();
    let moments = TermMoments::from_state(&circuit.prepare(&theta)?, &h)?;
    let c = h.coefficients();
    let sigmas: Vec<f64> = moments.sigma_sq().iter().map(|v| v.sqrt()).collect();
    let s_tot = 1000;

    let shots = allocate_prior_sigma(&c, &sigmas, s_tot, SigmaRegularization::default())?;
    for ((ci, si), n) in c.iter().zip(&sigmas).zip(&shots) {
        println!("  c = {ci:+.2}  σ = {si:.3}  shots {n}");
    }
    let s = s_tot as f64;
    println!("prior-σ {:.4e}", var_prior_sigma_deterministic(&c, &moments, s)?);
    println!("WDS     {:.4e}", var_wds(&c, &moments, s)?);
    println!("UDS     {:.4e}", var_uds(&c, &moments, s)?);
    Ok(())
}
