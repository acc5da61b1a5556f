use num_complex::Complex64;
use serde::Serialize;

use super::layout::PlaquetteLayout;
use super::operators::total_casimir;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Spectrum};
use crate::pauli::PauliSum;
use crate::state::StateVector;

/// Largest register for which sectors are computed by exact diagonalization.
pub const SECTOR_QUBIT_LIMIT: usize = 12;

/// Tolerance used to cluster eigenvalues of the Casimir sum into sectors.
pub const CLUSTER_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct SectorEntry {
    pub eigenvalue: f64,
    pub degeneracy: usize,
    #[serde(skip)]
    pub basis: Vec<StateVector>,
}

/// Common eigenspaces of `sum_v sum_a G^a(v)^2`, by increasing eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct GaugeSectorTable {
    pub n_qubits: usize,
    pub entries: Vec<SectorEntry>,
}

impl GaugeSectorTable {
    pub fn entry(&self, eigenvalue: f64) -> Result<&SectorEntry> {
        self.entries.iter().find(|e| (e.eigenvalue - eigenvalue).abs() < 1e-6).ok_or(Error::UnknownSector(eigenvalue))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.eigenvalue).collect()
    }

    /// Orthogonal projector onto one sector.
    pub fn projector(&self, eigenvalue: f64) -> Result<CMatrix> {
        let e = self.entry(eigenvalue)?;
        let dim = 1usize << self.n_qubits;
        let mut p = CMatrix::zeros(dim, dim);
        for v in &e.basis {
            let col = nalgebra::DVector::from_column_slice(v.amplitudes());
            p += &col * col.adjoint();
        }
        Ok(p)
    }

    /// Normalized projection of the lowest-index computational basis state
    /// with non-zero weight in the sector.
    pub fn canonical_state(&self, eigenvalue: f64) -> Result<StateVector> {
        let p = self.projector(eigenvalue)?;
        let dim = p.nrows();
        let k = (0..dim).find(|&k| p[(k, k)].re > 1e-9).ok_or(Error::UnknownSector(eigenvalue))?;
        StateVector::new(p.column(k).iter().copied().collect())
    }

    /// Largest operator-norm of `P_i H P_j` over distinct sectors `i != j`,
    /// measured as the largest matrix element magnitude.
    pub fn off_block_defect(&self, h: &CMatrix) -> Result<f64> {
        let projectors = self.entries.iter().map(|e| self.projector(e.eigenvalue)).collect::<Result<Vec<_>>>()?;
        let mut worst = 0.0f64;
        for (i, pi) in projectors.iter().enumerate() {
            for (j, pj) in projectors.iter().enumerate() {
                if i != j {
                    worst = worst.max((pi * h * pj).camax());
                }
            }
        }
        Ok(worst)
    }
}

/// Exact diagonalization of the total Casimir on the layout's register.
pub fn gauge_sectors(layout: &PlaquetteLayout) -> Result<GaugeSectorTable> {
    let n = layout.n_qubits();
    if n > SECTOR_QUBIT_LIMIT {
        return Err(Error::DimensionGuard { requested: n, limit: SECTOR_QUBIT_LIMIT });
    }
    sectors_of(&total_casimir(layout)?, n)
}

/// Sector table for an arbitrary Hermitian Pauli sum.
pub fn sectors_of(op: &PauliSum, n_qubits: usize) -> Result<GaugeSectorTable> {
    if n_qubits > SECTOR_QUBIT_LIMIT {
        return Err(Error::DimensionGuard { requested: n_qubits, limit: SECTOR_QUBIT_LIMIT });
    }
    let spectrum = Spectrum::of(&op.dense(n_qubits)?)?;
    let entries = spectrum
        .clusters(CLUSTER_TOLERANCE)
        .into_iter()
        .map(|(eigenvalue, cols)| SectorEntry {
            eigenvalue,
            degeneracy: cols.len(),
            basis: cols
                .iter()
                .map(|&k| {
                    let v: Vec<Complex64> = spectrum.vectors.column(k).iter().copied().collect();
                    StateVector::from_normalized(v)
                })
                .collect(),
        })
        .collect();
    Ok(GaugeSectorTable { n_qubits, entries })
}
