//! Shot-frugal estimation of Hamiltonian expectation values.
//!
//! A Hamiltonian `H = Σ c_i h_i` is measured one operator at a time, and the
//! total shot budget is split among the terms by one of five allocation
//! strategies (uniform or weighted deterministic, weighted random, weighted
//! hybrid, weighted single-term). Random allocation gives an unbiased energy
//! estimate from as little as one shot, which the Rosalin optimizer exploits
//! by adapting the shot count of every gradient component on the fly.
//!
//! The crate is organised bottom-up:
//!
//! - [`hamiltonian`]: Pauli strings, qubit-wise commuting groups, parsing,
//!   normalisation and greedy grouping.
//! - [`simulator`]: a small statevector simulator for the layered
//!   `Rz·Ry·Rz` ansatz, exact moments, single-shot sampling and a dense
//!   ground-energy oracle.
//! - [`sampling`]: shot allocation strategies and the single-shot estimator.
//! - [`variance`]: closed-form estimator variances and the prior-σ analysis.
//! - [`optimizer`]: Rosalin and an Adam baseline driven by parameter-shift
//!   gradients.
//! - [`harness`]: seeded multi-trial experiments that emit CSV, used by the
//!   `rosalin` binary.
//!
//! ```
//! use rosalin::hamiltonian::Hamiltonian;
//! use rosalin::sampling::{Sampler, Strategy};
//! use rosalin::simulator::AnsatzCircuit;
//! use rosalin::seed::SeedTree;
//!
//! let h: Hamiltonian = "0.5 ZI\n0.5 IZ\n".parse().unwrap();
//! let circuit = AnsatzCircuit::new(2, 0).unwrap();
//! let theta = vec![0.0; circuit.parameter_count()];
//! let mut rng = SeedTree::new(7).rng();
//! let estimate = rosalin::sampling::estimate_h(
//!     &theta, 1, &Sampler::new(Strategy::Wrs), &h, &circuit, &mut rng,
//! ).unwrap();
//! assert_eq!(estimate.mean(), 1.0);
//! ```

pub mod hamiltonian;
pub mod harness;
pub mod optimizer;
pub mod sampling;
pub mod seed;
pub mod simulator;
pub mod variance;

mod numeric;

pub use hamiltonian::{CommutingGroup, Hamiltonian, HamiltonianError, Operator, Pauli, PauliString};
pub use optimizer::{AdamConfig, Estimator, OptimizerError, RosalinConfig, RunTrace};
pub use sampling::{EstimateVector, Sampler, SamplingError, ShotAllocation, Strategy};
pub use simulator::{Ansatz, AnsatzCircuit, RyCircuit, SimulatorError, StateVector};
pub use variance::{TermMoments, VarianceError};
