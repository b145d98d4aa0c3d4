//! Closed-form estimator variances for every strategy, including the
//! non-vanishing single-term floor.

use rosalin::hamiltonian::Hamiltonian;
use rosalin::harness::{analytic_variance, log_grid};
use rosalin::sampling::Strategy;
use rosalin::simulator::AnsatzCircuit;
use rosalin::variance::{wss_floor, TermMoments};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h: Hamiltonian = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/data/skewed4.ham"))?.parse()?;
    let circuit = AnsatzCircuit::new(4, 1)?;
    let theta: Vec<f64> = (0..circuit.parameter_count()).map(|i| (i as f64).sin()).collect();
    let moments = TermMoments::from_state(&circuit.prepare(&theta)?, &h)?;

    print!("{:>8}", "s_tot");
    for s in Strategy::ALL {
        print!("{:>12}", s.to_string());
    }
    println!();
    for s_tot in log_grid(100_000) {
        print!("{s_tot:>8}");
        for s in Strategy::ALL {
            if s_tot < s.shot_floor(&h) {
                print!("{:>12}", "-");
            } else {
                print!("{:>12.3e}", analytic_variance(s, &h, &moments, s_tot)?);
            }
        }
        println!();
    }
    println!("WSS floor: {:.4e}", wss_floor(&h.coefficients(), &moments));
    Ok(())
}
