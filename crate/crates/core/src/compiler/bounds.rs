//! Product-formula step-count bound
//! `N_s <= 2 m 5^{2k} (m ||H|| t)^{1 + 1/2k} / eps^{1/2k}` and its comparison
//! with measured digitization errors.

use serde::Serialize;

use crate::dynamics::{trotter_evolve, Propagator, TrotterPlan};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::state::StateVector;

/// Coefficient of the printed per-plaquette bound
/// `N_s <= 2300 N (N |J| t)^{3/2} / sqrt(eps)`.
pub const PRINTED_COEFFICIENT: f64 = 2300.0;

/// Monomials per plaquette.
pub const TERMS_PER_PLAQUETTE: usize = 16;

fn check(eps: f64, k: u32) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("target error must be positive, got {eps}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("fractal degree k must be at least 1".into()));
    }
    Ok(())
}

/// The bound before rounding up.
pub fn trotter_bound_value(m: usize, norm_bound: f64, t: f64, eps: f64, k: u32) -> Result<f64> {
    check(eps, k)?;
    let k2 = 2.0 * k as f64;
    let m = m as f64;
    Ok(2.0 * m * 5f64.powf(k2) * (m * norm_bound * t.abs()).powf(1.0 + 1.0 / k2) / eps.powf(1.0 / k2))
}

/// Step count: the ceiling of [`trotter_bound_value`].
pub fn trotter_bound(m: usize, norm_bound: f64, t: f64, eps: f64, k: u32) -> Result<u64> {
    Ok(trotter_bound_value(m, norm_bound, t, eps, k)?.ceil() as u64)
}

/// Error that the bound guarantees at a given step count, obtained by
/// solving the bound for `eps`: `eps = (C / N)^{2k}` with `C` the bound at `eps = 1`.
pub fn implied_error(m: usize, norm_bound: f64, t: f64, steps: usize, k: u32) -> Result<f64> {
    let c = trotter_bound_value(m, norm_bound, t, 1.0, k)?;
    Ok((c / steps as f64).powi(2 * k as i32))
}

/// Norm reading that reproduces the printed constant: `||H|| = |J|/8`.
pub fn adopted_norm(j: f64) -> f64 {
    j.abs() / 8.0
}

/// Triangle-inequality norm bound: 16 terms of magnitude `|J|/2` per plaquette.
pub fn triangle_norm(j: f64, plaquettes: usize) -> f64 {
    8.0 * j.abs() * plaquettes as f64
}

/// General bound specialised to `plaquettes` plaquettes with `m = 16 N`,
/// `||H|| = |J|/8` and `k = 1`, as a function of `|J| t`.
pub fn plaquette_bound(plaquettes: usize, jt: f64, eps: f64) -> Result<f64> {
    trotter_bound_value(TERMS_PER_PLAQUETTE * plaquettes, adopted_norm(1.0), jt, eps, 1)
}

/// The printed bound `2300 N (N |J| t)^{3/2} / sqrt(eps)`.
pub fn printed_bound(plaquettes: usize, jt: f64, eps: f64) -> Result<f64> {
    check(eps, 1)?;
    let n = plaquettes as f64;
    Ok(PRINTED_COEFFICIENT * n * (n * jt.abs()).powf(1.5) / eps.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub steps: usize,
    pub measured_error: f64,
    pub implied_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub m: usize,
    pub norm_bound: f64,
    pub time: f64,
    pub k: u32,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Measures `||psi_D - psi_I||` at each step count and compares it with the
/// error the bound implies for that count.
pub fn empirical_vs_bound(
    h: &PauliSum,
    plan: &TrotterPlan,
    psi0: &StateVector,
    steps: &[usize],
    norm_bound: f64,
    k: u32,
) -> Result<BoundReport> {
    let t = plan.time();
    let exact = Propagator::new(h, psi0.n_qubits())?.evolve(psi0, t)?;
    let m = plan.order().len();
    let rows = steps
        .iter()
        .map(|&n| {
            let d = trotter_evolve(h, &plan.with_steps(n)?, psi0)?;
            let measured_error = d.distance(&exact)?;
            let implied = implied_error(m, norm_bound, t, n, k)?;
            Ok(BoundRow { steps: n, measured_error, implied_error: implied, holds: measured_error <= implied })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport { m, norm_bound, time: t, k, rows })
}
