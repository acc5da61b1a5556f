//! Additive gate-error model: `F = 1 - sum_k eps_k`.

use serde::Serialize;

use super::circuit::Counts;
use super::lower::GateSet;
use crate::error::{Error, Result};

/// Per-gate error rates. Single-qubit rotations carry the entangling error
/// of the gate set times `single_qubit_factor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    pub eps_collective: f64,
    pub eps_cphase: f64,
    pub single_qubit_factor: f64,
}

impl NoiseModel {
    pub const SINGLE_QUBIT_FACTOR: f64 = 1.0 / 20.0;

    pub fn new(eps_collective: f64, eps_cphase: f64, single_qubit_factor: f64) -> Result<Self> {
        for (name, v) in [
            ("collective error", eps_collective),
            ("c-phase error", eps_cphase),
            ("single-qubit factor", single_qubit_factor),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} {v} outside [0, 1]")));
            }
        }
        Ok(NoiseModel { eps_collective, eps_cphase, single_qubit_factor })
    }

    pub fn noiseless() -> Self {
        NoiseModel { eps_collective: 0.0, eps_cphase: 0.0, single_qubit_factor: Self::SINGLE_QUBIT_FACTOR }
    }

    /// `sum_k eps_k` for the given gate totals.
    pub fn total_error(&self, counts: Counts, gates: GateSet) -> f64 {
        let eps_single = match gates {
            GateSet::Collective => self.eps_collective,
            GateSet::Cphase => self.eps_cphase,
        } * self.single_qubit_factor;
        counts.collective as f64 * self.eps_collective
            + counts.cphase as f64 * self.eps_cphase
            + counts.single as f64 * eps_single
    }

    /// `max(0, 1 - sum_k eps_k)`.
    pub fn fidelity(&self, counts: Counts, gates: GateSet) -> f64 {
        (1.0 - self.total_error(counts, gates)).max(0.0)
    }
}

/// Best- and worst-case noise models bracketing the expected error window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseWindow {
    pub best: NoiseModel,
    pub worst: NoiseModel,
}

impl NoiseWindow {
    /// Collective gates 0.01% to 0.05%, C-phase gates 0.001% to 0.005%,
    /// single-qubit rotations 1/20 of either.
    pub fn reference() -> Self {
        let f = NoiseModel::SINGLE_QUBIT_FACTOR;
        NoiseWindow {
            best: NoiseModel { eps_collective: 1e-4, eps_cphase: 1e-5, single_qubit_factor: f },
            worst: NoiseModel { eps_collective: 5e-4, eps_cphase: 5e-5, single_qubit_factor: f },
        }
    }

    pub fn point(model: NoiseModel) -> Self {
        NoiseWindow { best: model, worst: model }
    }
}

/// `(low, high)` fidelity caps over the window: low from the worst model.
pub fn fidelity_cap(counts: Counts, gates: GateSet, window: &NoiseWindow) -> (f64, f64) {
    (window.worst.fidelity(counts, gates), window.best.fidelity(counts, gates))
}
