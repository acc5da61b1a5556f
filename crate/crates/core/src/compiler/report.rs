use serde::Serialize;

use super::circuit::Circuit;
use super::lower::GateSet;
use super::noise::{fidelity_cap, NoiseWindow};
use crate::pauli::PauliString;

/// Upper bound on single-qubit rotations for one pass over the strings:
/// `2N + 1` per string on the collective gate set, `6N + 1` on the C-phase set.
pub fn single_qubit_bound(monomials: &[PauliString], gates: GateSet) -> usize {
    let per = |n: usize| match gates {
        GateSet::Collective => 2 * n + 1,
        GateSet::Cphase => 6 * n + 1,
    };
    monomials.iter().map(|m| if m.weight() >= 2 { per(m.weight()) } else { m.weight() }).sum()
}

/// Gate totals of `steps` repetitions of a compiled step, with the
/// fidelity band of a noise window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceReport {
    pub schema: u32,
    pub backend: GateSet,
    pub steps: usize,
    pub collective: usize,
    pub cphase: usize,
    pub single: usize,
    pub single_bound: usize,
    pub fidelity_band: [f64; 2],
}

impl ResourceReport {
    pub fn new(step: &Circuit, monomials: &[PauliString], gates: GateSet, steps: usize, window: &NoiseWindow) -> Self {
        let c = step.counts().times(steps);
        let (low, high) = fidelity_cap(c, gates, window);
        ResourceReport {
            schema: 1,
            backend: gates,
            steps,
            collective: c.collective,
            cphase: c.cphase,
            single: c.single,
            single_bound: single_qubit_bound(monomials, gates) * steps,
            fidelity_band: [low, high],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
