//! Gate-level compilation of product-formula steps, resource accounting,
//! the additive noise model and step-count bounds.

pub mod bounds;
pub mod circuit;
pub mod lower;
pub mod noise;
pub mod report;
pub mod stabilizer;

pub use bounds::{empirical_vs_bound, implied_error, printed_bound, trotter_bound, BoundReport};
pub use circuit::{Ancilla, AncillaState, Circuit, Counts, Gate};
pub use lower::{compile_collective, compile_cphase, compile_step, verify, GateSet};
pub use noise::{fidelity_cap, NoiseModel, NoiseWindow};
pub use report::{single_qubit_bound, ResourceReport};
