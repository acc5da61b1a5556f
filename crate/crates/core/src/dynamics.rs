//! Exact and Trotterized time evolution and the digitization-error sweeps.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Spectrum;
use crate::linkmodel::{gauge_sectors, plaquette_hamiltonian, plaquette_monomials, total_casimir, PlaquetteLayout};
use crate::pauli::{PauliString, PauliSum};
use crate::state::StateVector;

/// Largest register evolved through a dense spectral decomposition.
pub const EXACT_QUBIT_LIMIT: usize = 12;

/// Smallest `<sum G^2>` accepted as the denominator of the gauge deviation.
pub const DIVISION_GUARD: f64 = 1e-12;

fn guard(n_qubits: usize) -> Result<()> {
    if n_qubits > EXACT_QUBIT_LIMIT {
        return Err(Error::DimensionGuard { requested: n_qubits, limit: EXACT_QUBIT_LIMIT });
    }
    Ok(())
}

fn check_register(h: &PauliSum, psi: &StateVector) -> Result<()> {
    guard(psi.n_qubits())?;
    if let Some(q) = h.max_qubit().filter(|&q| q >= psi.n_qubits()) {
        return Err(Error::SupportOutOfRange { qubit: q, n_qubits: psi.n_qubits() });
    }
    Ok(())
}

/// Spectral decomposition of a Hamiltonian, reusable across evolution times.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: Spectrum,
    n_qubits: usize,
}

impl Propagator {
    pub fn new(h: &PauliSum, n_qubits: usize) -> Result<Self> {
        guard(n_qubits)?;
        Ok(Propagator { spectrum: Spectrum::of(&h.dense(n_qubits)?)?, n_qubits })
    }

    /// `exp(-i H t) psi`.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.n_qubits, found: psi.dim() });
        }
        Ok(StateVector::from_normalized(self.spectrum.evolve(psi.amplitudes(), t)))
    }
}

pub fn exact_evolve(h: &PauliSum, psi: &StateVector, t: f64) -> Result<StateVector> {
    check_register(h, psi)?;
    Propagator::new(h, psi.n_qubits())?.evolve(psi, t)
}

/// Ordered product formula `(prod_k exp(-i h_k t / N))^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    order: Vec<PauliString>,
    steps: usize,
    time: f64,
}

impl TrotterPlan {
    pub fn new(order: Vec<PauliString>, steps: usize, time: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidPlan("step count must be at least 1".into()));
        }
        if !time.is_finite() {
            return Err(Error::InvalidPlan(format!("non-finite time {time}")));
        }
        for t in &order {
            if t.coefficient().im.abs() > 1e-12 {
                return Err(Error::ComplexCoefficient(t.coefficient().im));
            }
        }
        Ok(TrotterPlan { order, steps, time })
    }

    /// Terms in the sum's canonical order.
    pub fn canonical(h: &PauliSum, steps: usize, time: f64) -> Result<Self> {
        TrotterPlan::new(h.terms().to_vec(), steps, time)
    }

    /// Plaquette monomials in listing order.
    pub fn listing(layout: &PlaquetteLayout, j: f64, steps: usize, time: f64) -> Result<Self> {
        TrotterPlan::new(plaquette_monomials(layout, j)?.into_iter().map(|m| m.term).collect(), steps, time)
    }

    pub fn order(&self) -> &[PauliString] {
        &self.order
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        TrotterPlan::new(self.order.clone(), steps, self.time)
    }

    /// Fails unless the order lists every term of `h` exactly once.
    pub fn validate(&self, h: &PauliSum) -> Result<()> {
        let covered = PauliSum::from_terms(self.order.iter().cloned());
        if self.order.len() != h.len() || covered != *h {
            return Err(Error::InvalidPlan(format!(
                "order has {} terms but does not cover the {} terms of the Hamiltonian exactly once",
                self.order.len(),
                h.len()
            )));
        }
        Ok(())
    }
}

/// `psi <- exp(-i theta P) psi = cos(theta) psi - i sin(theta) P psi` for a
/// unit-coefficient Pauli string `P`.
pub fn apply_pauli_exponential(p: &PauliString, theta: f64, psi: &mut [Complex64]) {
    let (c, s) = (theta.cos(), theta.sin());
    let rotated = p.unit().apply(psi);
    for (a, b) in psi.iter_mut().zip(rotated) {
        *a = *a * c + b * Complex64::new(0.0, -s);
    }
}

pub fn trotter_evolve(h: &PauliSum, plan: &TrotterPlan, psi: &StateVector) -> Result<StateVector> {
    check_register(h, psi)?;
    plan.validate(h)?;
    let dt = plan.time / plan.steps as f64;
    let mut amps = psi.amplitudes().to_vec();
    for _ in 0..plan.steps {
        for term in &plan.order {
            apply_pauli_exponential(term, term.coefficient().re * dt, &mut amps);
        }
    }
    Ok(StateVector::from_normalized(amps))
}

/// `|<psi|chi>|^2`.
pub fn overlap(psi: &StateVector, chi: &StateVector) -> Result<f64> {
    Ok(psi.inner(chi)?.norm_sqr())
}

/// `E = (<sum G^2>_I - <sum G^2>_D) / <sum G^2>_I`.
pub fn gauge_deviation(psi_i: &StateVector, psi_d: &StateVector, layout: &PlaquetteLayout) -> Result<f64> {
    let c = total_casimir(layout)?;
    deviation_with(&c, psi_i, psi_d)
}

fn deviation_with(c: &PauliSum, psi_i: &StateVector, psi_d: &StateVector) -> Result<f64> {
    if psi_i.dim() != psi_d.dim() {
        return Err(Error::DimensionMismatch { expected: psi_i.dim(), found: psi_d.dim() });
    }
    let ci = c.expectation(psi_i.amplitudes()).re;
    let cd = c.expectation(psi_d.amplitudes()).re;
    if ci.abs() < DIVISION_GUARD {
        return Err(Error::DivisionGuard(ci));
    }
    Ok((ci - cd) / ci)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Trotter,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "trotter" => Ok(Backend::Trotter),
            _ => Err(Error::InvalidParameter(format!("unknown evolution backend '{s}'"))),
        }
    }
}

/// A digitization experiment on one plaquette layout. Each grid point is
/// `(N, phi)` with evolution time `t = phi / J`.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub layout: PlaquetteLayout,
    pub j: f64,
    pub sector: f64,
    pub grid: Vec<(usize, f64)>,
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub phi: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "overlap_I0")]
    pub overlap_i0: f64,
    #[serde(rename = "fidelity_ID")]
    pub fidelity_id: f64,
    pub casimir_i: f64,
    pub casimir_d: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub sector: f64,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub const CSV_HEADER: &'static str = "N,phi,E,overlap_I0,fidelity_ID";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.n, r.phi, r.e, r.overlap_i0, r.fidelity_id));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::json!({ "schema": 1, "sector": self.sector, "rows": self.rows });
        serde_json::to_string_pretty(&value).expect("sweep rows serialize") + "\n"
    }
}

/// Evaluates every grid point from the sector's canonical initial state.
/// Points run in parallel and rows come back in grid order.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    if cfg.grid.is_empty() {
        return Ok(SweepTable { sector: cfg.sector, rows: Vec::new() });
    }
    if cfg.j == 0.0 || !cfg.j.is_finite() {
        return Err(Error::InvalidParameter(format!("coupling J must be finite and non-zero, got {}", cfg.j)));
    }
    let n = cfg.layout.n_qubits();
    let h = plaquette_hamiltonian(&cfg.layout, cfg.j)?;
    let casimir = total_casimir(&cfg.layout)?;
    let psi0 = gauge_sectors(&cfg.layout)?.canonical_state(cfg.sector)?;
    let propagator = Propagator::new(&h, n)?;
    let base = TrotterPlan::listing(&cfg.layout, cfg.j, 1, 0.0)?;
    let rows = cfg
        .grid
        .par_iter()
        .map(|&(steps, phi)| {
            let t = phi / cfg.j;
            let psi_i = propagator.evolve(&psi0, t)?;
            let psi_d = match cfg.backend {
                Backend::Exact => psi_i.clone(),
                Backend::Trotter => {
                    let plan = TrotterPlan::new(base.order.clone(), steps, t)?;
                    trotter_evolve(&h, &plan, &psi0)?
                }
            };
            Ok(SweepRow {
                n: steps,
                phi,
                e: deviation_with(&casimir, &psi_i, &psi_d)?,
                overlap_i0: overlap(&psi_i, &psi0)?,
                fidelity_id: overlap(&psi_i, &psi_d)?,
                casimir_i: casimir.expectation(psi_i.amplitudes()).re,
                casimir_d: casimir.expectation(psi_d.amplitudes()).re,
                distance: psi_i.distance(&psi_d)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { sector: cfg.sector, rows })
}

/// `phi = 0, 0.05, ..., 2.0` as used for the figure reproductions.
pub fn figure_phi_grid() -> Vec<f64> {
    (0..=40).map(|k| k as f64 * 0.05).collect()
}

/// Least-squares slope of `-log(err)` against `log(N)`.
pub fn loglog_slope(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| -e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
