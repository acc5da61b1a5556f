//! Classical simulation toolkit for an SU(2) quantum link model on triangular
//! plaquettes.
//!
//! Qubit 0 is the least significant bit of every basis index.

pub mod compiler;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod linkmodel;
pub mod matter;
pub mod pauli;
pub mod state;

pub use error::{Error, Result};
pub use linkmodel::{GaugeSectorTable, PlaquetteLayout};
pub use pauli::{Letter, PauliString, PauliSum};
pub use state::StateVector;
