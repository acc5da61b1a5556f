use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::apply_pauli_exponential;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{Letter, PauliString, DENSE_QUBIT_LIMIT};

/// A gate of one of the two hardware gate sets.
///
/// * `Rotation`: `exp(-i angle sigma^axis)` on one qubit.
/// * `Collective`: `exp(i angle sum_{i<j} X_i X_j)` over a qubit set.
/// * `CPhase`: `diag(1, 1, 1, exp(-2 i phi))` on a qubit pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Gate {
    Rotation { qubit: usize, axis: Letter, angle: f64 },
    Collective { qubits: Vec<usize>, angle: f64 },
    CPhase { control: usize, target: usize, phi: f64 },
}

impl Gate {
    pub fn rotation(qubit: usize, axis: Letter, angle: f64) -> Gate {
        Gate::Rotation { qubit, axis, angle }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Rotation { qubit, .. } => vec![*qubit],
            Gate::Collective { qubits, .. } => qubits.clone(),
            Gate::CPhase { control, target, .. } => vec![*control, *target],
        }
    }

    fn angle(&self) -> f64 {
        match self {
            Gate::Rotation { angle, .. } | Gate::Collective { angle, .. } => *angle,
            Gate::CPhase { phi, .. } => *phi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.angle().is_finite() {
            return Err(Error::InvalidParameter(format!("gate angle {} is not finite", self.angle())));
        }
        let q = self.qubits();
        for (k, a) in q.iter().enumerate() {
            if q[..k].contains(a) {
                return Err(Error::InvalidParameter(format!("gate acts twice on qubit {a}")));
            }
        }
        if matches!(self, Gate::Collective { .. }) && q.len() < 2 {
            return Err(Error::InvalidParameter("collective gate needs at least two qubits".into()));
        }
        Ok(())
    }

    /// Applies the gate in place to a state vector.
    pub fn apply(&self, psi: &mut [Complex64]) {
        match self {
            Gate::Rotation { qubit, axis, angle } => {
                apply_pauli_exponential(&PauliString::single(*qubit, *axis), *angle, psi)
            }
            Gate::Collective { qubits, angle } => {
                for (k, &a) in qubits.iter().enumerate() {
                    for &b in &qubits[k + 1..] {
                        let xx = PauliString::from_letters([(a, Letter::X), (b, Letter::X)]);
                        apply_pauli_exponential(&xx, -angle, psi);
                    }
                }
            }
            Gate::CPhase { control, target, phi } => {
                let mask = (1usize << control) | (1usize << target);
                let phase = Complex64::from_polar(1.0, -2.0 * phi);
                for (k, a) in psi.iter_mut().enumerate() {
                    if k & mask == mask {
                        *a *= phase;
                    }
                }
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Rotation { qubit, axis, angle } => {
                write!(f, "rot {} {qubit} {angle:?}", axis.as_char().to_ascii_lowercase())
            }
            Gate::Collective { qubits, angle } => {
                let q: Vec<String> = qubits.iter().map(usize::to_string).collect();
                write!(f, "collective {} {angle:?}", q.join(","))
            }
            Gate::CPhase { control, target, phi } => write!(f, "cphase {control} {target} {phi:?}"),
        }
    }
}

/// Per-kind gate totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub collective: usize,
    pub cphase: usize,
    pub single: usize,
}

impl Counts {
    fn add_gate(&mut self, g: &Gate) {
        match g {
            Gate::Rotation { .. } => self.single += 1,
            Gate::Collective { .. } => self.collective += 1,
            Gate::CPhase { .. } => self.cphase += 1,
        }
    }

    pub fn times(self, n: usize) -> Counts {
        Counts { collective: self.collective * n, cphase: self.cphase * n, single: self.single * n }
    }

    pub fn plus(self, o: Counts) -> Counts {
        Counts {
            collective: self.collective + o.collective,
            cphase: self.cphase + o.cphase,
            single: self.single + o.single,
        }
    }
}

/// Preparation of an ancilla qubit used by the C-phase gate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AncillaState {
    /// `(|0> + |1>)/sqrt(2)`, the `+1` eigenstate of `X`.
    Plus,
    /// `(|0> - i|1>)/sqrt(2)`, the `-1` eigenstate of `Y`.
    YMinus,
}

impl AncillaState {
    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            AncillaState::Plus => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            AncillaState::YMinus => [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        }
    }

    /// `(axis, eigenvalue)` of the state.
    pub fn eigen(self) -> (Letter, f64) {
        match self {
            AncillaState::Plus => (Letter::X, 1.0),
            AncillaState::YMinus => (Letter::Y, -1.0),
        }
    }

    fn name(self) -> &'static str {
        match self {
            AncillaState::Plus => "plus",
            AncillaState::YMinus => "y-minus",
        }
    }

    fn parse(s: &str) -> Option<AncillaState> {
        match s {
            "plus" => Some(AncillaState::Plus),
            "y-minus" => Some(AncillaState::YMinus),
            _ => None,
        }
    }
}

/// An ancilla that must be prepared in `initial` before the circuit runs and
/// is left in `last` afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ancilla {
    pub qubit: usize,
    pub initial: AncillaState,
    pub last: AncillaState,
}

/// Gates in time order, with counters kept equal to a recount.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Circuit {
    gates: Vec<Gate>,
    counts: Counts,
    ancilla: Option<Ancilla>,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate()?;
        self.counts.add_gate(&gate);
        self.gates.push(gate);
        Ok(())
    }

    /// Appends another circuit. Ancilla bookkeeping must agree: the other
    /// circuit has to start from the state this one leaves the ancilla in.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        match (self.ancilla, other.ancilla) {
            (Some(a), Some(b)) => {
                if a.qubit != b.qubit || a.last != b.initial {
                    return Err(Error::InvalidParameter("ancilla preparation mismatch while appending".into()));
                }
                self.ancilla = Some(Ancilla { last: b.last, ..a });
            }
            (None, Some(b)) => {
                if self.gates.iter().any(|g| g.qubits().contains(&b.qubit)) {
                    return Err(Error::InvalidParameter(format!(
                        "qubit {} is used before its ancilla preparation",
                        b.qubit
                    )));
                }
                self.ancilla = Some(b);
            }
            (None, None) | (Some(_), None) => {}
        }
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn counts(&self) -> Counts {
        self.counts
    }

    pub fn recount(&self) -> Counts {
        let mut c = Counts::default();
        for g in &self.gates {
            c.add_gate(g);
        }
        c
    }

    pub fn ancilla(&self) -> Option<Ancilla> {
        self.ancilla
    }

    pub fn set_ancilla(&mut self, ancilla: Option<Ancilla>) {
        self.ancilla = ancilla;
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.gates.iter().flat_map(Gate::qubits).chain(self.ancilla.map(|a| a.qubit)).max()
    }

    pub fn apply(&self, psi: &mut [Complex64]) {
        for g in &self.gates {
            g.apply(psi);
        }
    }

    /// Dense unitary on `n_qubits`, built column by column.
    pub fn unitary(&self, n_qubits: usize) -> Result<CMatrix> {
        if n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::DimensionGuard { requested: n_qubits, limit: DENSE_QUBIT_LIMIT });
        }
        if let Some(q) = self.max_qubit().filter(|&q| q >= n_qubits) {
            return Err(Error::SupportOutOfRange { qubit: q, n_qubits });
        }
        let dim = 1usize << n_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        for k in 0..dim {
            let mut col = vec![Complex64::new(0.0, 0.0); dim];
            col[k] = Complex64::new(1.0, 0.0);
            self.apply(&mut col);
            u.set_column(k, &nalgebra::DVector::from_vec(col));
        }
        Ok(u)
    }

    /// Action on the non-ancilla qubits of an `n_qubits` register:
    /// `<a_last| U |a_initial>`, with rows and columns indexed by the basis of
    /// the remaining qubits in their original order. Without an ancilla this
    /// is the full unitary.
    pub fn reduced_unitary(&self, n_qubits: usize) -> Result<CMatrix> {
        let u = self.unitary(n_qubits)?;
        let Some(a) = self.ancilla else {
            return Ok(u);
        };
        let q = a.qubit;
        let insert = |k: usize, bit: usize| {
            let low = k & ((1 << q) - 1);
            ((k >> q) << (q + 1)) | (bit << q) | low
        };
        let (ai, af) = (a.initial.amplitudes(), a.last.amplitudes());
        let dim = 1usize << (n_qubits - 1);
        let mut m = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for (br, fr) in af.iter().enumerate() {
                    for (bc, ic) in ai.iter().enumerate() {
                        acc += fr.conj() * u[(insert(r, br), insert(c, bc))] * ic;
                    }
                }
                m[(r, c)] = acc;
            }
        }
        Ok(m)
    }

    /// Line-oriented text form, one gate per line.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.counts;
        writeln!(f, "# collective={} cphase={} single={}", c.collective, c.cphase, c.single)?;
        if let Some(a) = self.ancilla {
            writeln!(f, "ancilla {} {} {}", a.qubit, a.initial.name(), a.last.name())?;
        }
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Circuit::new();
        for (k, raw) in s.lines().enumerate() {
            let line = k + 1;
            let err = |reason: &str| Error::CircuitParse { line, reason: reason.into() };
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let tok: Vec<&str> = text.split_whitespace().collect();
            let num = |t: &str| t.parse::<usize>().map_err(|_| err("bad qubit index"));
            let ang = |t: &str| t.parse::<f64>().map_err(|_| err("bad angle"));
            let gate = match tok.as_slice() {
                ["ancilla", q, i, l] => {
                    let initial = AncillaState::parse(i).ok_or_else(|| err("bad ancilla state"))?;
                    let last = AncillaState::parse(l).ok_or_else(|| err("bad ancilla state"))?;
                    c.ancilla = Some(Ancilla { qubit: num(q)?, initial, last });
                    continue;
                }
                ["rot", axis, q, a] => {
                    let axis: Letter = axis.parse().map_err(|_| err("bad rotation axis"))?;
                    Gate::Rotation { qubit: num(q)?, axis, angle: ang(a)? }
                }
                ["collective", qs, a] => {
                    Gate::Collective { qubits: qs.split(',').map(num).collect::<Result<_>>()?, angle: ang(a)? }
                }
                ["cphase", ctl, tgt, p] => Gate::CPhase { control: num(ctl)?, target: num(tgt)?, phi: ang(p)? },
                _ => return Err(err("unrecognized gate line")),
            };
            c.push(gate).map_err(|e| err(&e.to_string()))?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expi_hermitian, max_deviation_up_to_phase, unitarity_defect};
    use crate::pauli::PauliSum;

    #[test]
    fn counters_match_recount() {
        let mut c = Circuit::new();
        c.push(Gate::rotation(0, Letter::X, 0.3)).unwrap();
        c.push(Gate::Collective { qubits: vec![0, 1, 2], angle: 0.5 }).unwrap();
        c.push(Gate::CPhase { control: 0, target: 2, phi: 0.1 }).unwrap();
        assert_eq!(c.counts(), c.recount());
        assert_eq!(c.counts(), Counts { collective: 1, cphase: 1, single: 1 });
    }

    #[test]
    fn invalid_gates_rejected() {
        let mut c = Circuit::new();
        assert!(c.push(Gate::CPhase { control: 1, target: 1, phi: 0.1 }).is_err());
        assert!(c.push(Gate::rotation(0, Letter::Z, f64::NAN)).is_err());
        assert!(c.push(Gate::Collective { qubits: vec![2], angle: 0.1 }).is_err());
        assert!(c.gates().is_empty());
    }

    #[test]
    fn gate_matrices() {
        let mut c = Circuit::new();
        c.push(Gate::Collective { qubits: vec![0, 2], angle: 0.4 }).unwrap();
        let want = expi_hermitian(&"(1) X0 X2".parse::<PauliSum>().unwrap().dense(3).unwrap(), 0.4).unwrap();
        assert!((c.unitary(3).unwrap() - want).camax() < 1e-12);

        let mut r = Circuit::new();
        r.push(Gate::rotation(1, Letter::Y, 0.9)).unwrap();
        let want = expi_hermitian(&"(1) Y1".parse::<PauliSum>().unwrap().dense(2).unwrap(), -0.9).unwrap();
        assert!((r.unitary(2).unwrap() - want).camax() < 1e-12);
    }

    #[test]
    fn cphase_identity_with_local_rotations() {
        // Rz(b) Rz(b) CP(2b) is proportional to exp(-i b Z Z)
        let b = 0.37;
        let mut c = Circuit::new();
        c.push(Gate::CPhase { control: 0, target: 1, phi: 2.0 * b }).unwrap();
        c.push(Gate::rotation(0, Letter::Z, b)).unwrap();
        c.push(Gate::rotation(1, Letter::Z, b)).unwrap();
        let zz = "(1) Z0 Z1".parse::<PauliSum>().unwrap().dense(2).unwrap();
        let want = expi_hermitian(&zz, -b).unwrap();
        assert!(max_deviation_up_to_phase(&c.unitary(2).unwrap(), &want) < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let mut c = Circuit::new();
        c.push(Gate::rotation(3, Letter::Y, -std::f64::consts::FRAC_PI_4)).unwrap();
        c.push(Gate::Collective { qubits: vec![0, 2, 4], angle: 0.1 + 0.2 }).unwrap();
        c.push(Gate::CPhase { control: 6, target: 1, phi: 1e-17 }).unwrap();
        c.set_ancilla(Some(Ancilla { qubit: 6, initial: AncillaState::Plus, last: AncillaState::YMinus }));
        let back: Circuit = c.to_text().parse().unwrap();
        assert_eq!(back, c);
        assert!(matches!("rot w 0 1".parse::<Circuit>(), Err(Error::CircuitParse { line: 1, .. })));
        assert!(matches!("\nfoo".parse::<Circuit>(), Err(Error::CircuitParse { line: 2, .. })));
    }

    #[test]
    fn reduced_unitary_projects_ancilla() {
        let mut c = Circuit::new();
        c.push(Gate::rotation(0, Letter::X, 0.2)).unwrap();
        c.set_ancilla(Some(Ancilla { qubit: 1, initial: AncillaState::Plus, last: AncillaState::Plus }));
        let m = c.reduced_unitary(2).unwrap();
        assert!(unitarity_defect(&m) < 1e-12);
        let want = expi_hermitian(&"(1) X0".parse::<PauliSum>().unwrap().dense(1).unwrap(), -0.2).unwrap();
        assert!((m - want).camax() < 1e-12);
    }
}
