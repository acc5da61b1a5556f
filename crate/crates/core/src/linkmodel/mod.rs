//! SU(2) quantum link operators in the two-qubit encoding, the plaquette
//! Hamiltonian and its gauge-sector decomposition.

pub mod hamiltonian;
pub mod layout;
pub mod operators;
pub mod sectors;

pub use hamiltonian::{census, plaquette_hamiltonian, plaquette_monomials, Census, Monomial};
pub use layout::{End, Link, PlaquetteLayout, Vertex};
pub use operators::{
    color_rotation, gamma, gauge_covariance_check, gauge_generator, left_right_generators, link_operator, total_casimir,
};
pub use sectors::{gauge_sectors, sectors_of, GaugeSectorTable, SectorEntry};
