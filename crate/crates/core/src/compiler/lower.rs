//! Lowering of Pauli-string exponentials `exp(-i phi h)` to the collective
//! and the C-phase gate sets.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use super::circuit::{Ancilla, AncillaState, Circuit, Gate};
use super::stabilizer::{ancilla_axis, collective_head, sandwich_sign};
use crate::error::{Error, Result};
use crate::linalg::{expi_hermitian, max_deviation_up_to_phase};
use crate::pauli::{Letter, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateSet {
    Collective,
    Cphase,
}

impl std::str::FromStr for GateSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "collective" => Ok(GateSet::Collective),
            "cphase" => Ok(GateSet::Cphase),
            _ => Err(Error::InvalidParameter(format!("unknown backend '{s}' (expected collective or cphase)"))),
        }
    }
}

impl std::fmt::Display for GateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GateSet::Collective => "collective",
            GateSet::Cphase => "cphase",
        })
    }
}

/// Rotation `v = exp(-i alpha A)` with `v from v^dagger = to`, for distinct letters.
fn basis_change(from: Letter, to: Letter) -> (Letter, f64) {
    let axis = from.third(to).expect("distinct letters");
    // exp(-i pi/4 A) B exp(i pi/4 A) = i B A for B anticommuting with A
    let (power, _) = from.mul(axis);
    let plus = (power + 1) % 4 == 0;
    (axis, if plus { FRAC_PI_4 } else { -FRAC_PI_4 })
}

/// Letters to rotate into the canonical string, as `(qubit, axis, alpha)`.
fn rotations(monomial: &PauliString, canonical: &dyn Fn(usize) -> Letter) -> Vec<(usize, Letter, f64)> {
    monomial
        .letters()
        .iter()
        .filter(|(&q, &l)| canonical(q) != l)
        .map(|(&q, &l)| {
            let (axis, alpha) = basis_change(canonical(q), l);
            (q, axis, alpha)
        })
        .collect()
}

fn real_angle(monomial: &PauliString, phi: f64) -> Result<f64> {
    let c = monomial.coefficient();
    if c.im.abs() > 1e-12 {
        return Err(Error::ComplexCoefficient(c.im));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("angle {phi} is not finite")));
    }
    Ok(phi * c.re)
}

/// Weight-0 and weight-1 strings need no entangling gates.
fn trivial(monomial: &PauliString, theta: f64) -> Result<Option<Circuit>> {
    let mut c = Circuit::new();
    match monomial.weight() {
        0 => Ok(Some(c)),
        1 => {
            let (&q, &l) = monomial.letters().iter().next().unwrap();
            c.push(Gate::rotation(q, l, theta))?;
            Ok(Some(c))
        }
        _ => Ok(None),
    }
}

fn sandwich(
    c: &mut Circuit,
    pre: &[(usize, Letter, f64)],
    core: impl FnOnce(&mut Circuit) -> Result<()>,
) -> Result<()> {
    for &(q, axis, alpha) in pre {
        c.push(Gate::rotation(q, axis, -alpha))?;
    }
    core(c)?;
    for &(q, axis, alpha) in pre {
        c.push(Gate::rotation(q, axis, alpha))?;
    }
    Ok(())
}

/// `exp(-i phi h)` with two collective gates over the support of `h` and at
/// most `2N + 1` single-qubit rotations.
pub fn compile_collective(monomial: &PauliString, phi: f64) -> Result<Circuit> {
    let theta = real_angle(monomial, phi)?;
    if let Some(c) = trivial(monomial, theta)? {
        return Ok(c);
    }
    let n = monomial.weight();
    let support: Vec<usize> = monomial.support().collect();
    let head_letter = collective_head(n);
    let head = support.iter().copied().find(|&q| monomial.letter(q) == Some(head_letter)).unwrap_or(support[0]);
    let canonical = move |q: usize| if q == head { head_letter } else { Letter::X };
    let pre = rotations(monomial, &canonical);
    let mut c = Circuit::new();
    sandwich(&mut c, &pre, |c| {
        c.push(Gate::Collective { qubits: support.clone(), angle: -FRAC_PI_4 })?;
        c.push(Gate::rotation(head, Letter::Z, theta * sandwich_sign(n)))?;
        c.push(Gate::Collective { qubits: support.clone(), angle: FRAC_PI_4 })
    })?;
    Ok(c)
}

/// `exp(i gamma Z_a Z_b)` as one C-phase gate and two Z rotations.
fn push_zz(c: &mut Circuit, a: usize, b: usize, gamma: f64) -> Result<()> {
    c.push(Gate::CPhase { control: a, target: b, phi: -2.0 * gamma })?;
    c.push(Gate::rotation(a, Letter::Z, -gamma))?;
    c.push(Gate::rotation(b, Letter::Z, -gamma))
}

/// Ancilla preparation for an `N`-body string.
pub fn ancilla_state(n: usize) -> AncillaState {
    if ancilla_axis(n) == Letter::X {
        AncillaState::Plus
    } else {
        AncillaState::YMinus
    }
}

/// `exp(-i phi h)` with `2N` C-phase gates through an ancilla prepared in the
/// eigenstate given by [`ancilla_state`], and at most `6N + 1` single-qubit
/// rotations.
pub fn compile_cphase(monomial: &PauliString, phi: f64, ancilla: usize) -> Result<Circuit> {
    if monomial.letter(ancilla).is_some() {
        return Err(Error::AncillaCollision(ancilla));
    }
    let theta = real_angle(monomial, phi)?;
    if let Some(c) = trivial(monomial, theta)? {
        return Ok(c);
    }
    let n = monomial.weight();
    let support: Vec<usize> = monomial.support().collect();
    let state = ancilla_state(n);
    let (axis, lambda) = state.eigen();
    debug_assert_eq!(axis, ancilla_axis(n));
    let pre = rotations(monomial, &|_| Letter::Z);
    let mut c = Circuit::new();
    c.set_ancilla(Some(Ancilla { qubit: ancilla, initial: state, last: state }));
    sandwich(&mut c, &pre, |c| {
        for &j in &support {
            push_zz(c, ancilla, j, -FRAC_PI_4)?;
        }
        c.push(Gate::rotation(ancilla, Letter::X, -theta * sandwich_sign(n) * lambda))?;
        for &j in &support {
            push_zz(c, ancilla, j, FRAC_PI_4)?;
        }
        Ok(())
    })?;
    Ok(c)
}

/// Rotation taking the ancilla from one preparation to the other.
fn ancilla_switch(qubit: usize, from: AncillaState, to: AncillaState) -> Option<Gate> {
    match (from, to) {
        (AncillaState::Plus, AncillaState::YMinus) => Some(Gate::rotation(qubit, Letter::Z, -FRAC_PI_4)),
        (AncillaState::YMinus, AncillaState::Plus) => Some(Gate::rotation(qubit, Letter::Z, FRAC_PI_4)),
        _ => None,
    }
}

/// Default ancilla: one above the highest qubit used by the monomials.
pub fn default_ancilla(monomials: &[PauliString]) -> usize {
    monomials.iter().filter_map(PauliString::max_qubit).max().map_or(0, |q| q + 1)
}

/// One product-formula step `prod_k exp(-i phi h_k)` in the given order. On
/// the C-phase gate set the ancilla is re-prepared with a Z rotation whenever
/// consecutive strings need different preparations.
pub fn compile_step(monomials: &[PauliString], phi: f64, gates: GateSet, ancilla: Option<usize>) -> Result<Circuit> {
    let a = ancilla.unwrap_or_else(|| default_ancilla(monomials));
    let mut step = Circuit::new();
    for m in monomials {
        let c = match gates {
            GateSet::Collective => compile_collective(m, phi)?,
            GateSet::Cphase => compile_cphase(m, phi, a)?,
        };
        if let (Some(have), Some(need)) = (step.ancilla(), c.ancilla()) {
            if let Some(g) = ancilla_switch(a, have.last, need.initial) {
                step.push(g)?;
                step.set_ancilla(Some(Ancilla { last: need.initial, ..have }));
            }
        }
        step.append(&c)?;
    }
    Ok(step)
}

/// Register width covering the circuit and the strings.
fn width(circuit: &Circuit, strings: &[PauliString]) -> usize {
    strings.iter().filter_map(PauliString::max_qubit).chain(circuit.max_qubit()).max().map_or(1, |q| q + 1)
}

fn drop_qubit(p: &PauliString, ancilla: Option<usize>) -> PauliString {
    let Some(a) = ancilla else {
        return p.clone();
    };
    let letters = p.letters().iter().map(|(&q, &l)| (if q > a { q - 1 } else { q }, l));
    PauliString::new(p.coefficient(), letters).expect("non-zero coefficient")
}

/// Max deviation, up to global phase, between the circuit's action on the
/// non-ancilla qubits and `prod_k exp(-i phi h_k)` (first string applied first).
pub fn verify(circuit: &Circuit, strings: &[PauliString], phi: f64) -> Result<f64> {
    let n = width(circuit, strings);
    let anc = circuit.ancilla().map(|a| a.qubit);
    let reduced = circuit.reduced_unitary(n)?;
    let sys_n = if anc.is_some() { n - 1 } else { n };
    let dim = 1usize << sys_n;
    let mut want = crate::linalg::CMatrix::identity(dim, dim);
    for s in strings {
        let p = drop_qubit(s, anc);
        let h = PauliSum::from(p).dense(sys_n)?;
        want = expi_hermitian(&h, -phi)? * want;
    }
    Ok(max_deviation_up_to_phase(&reduced, &want))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn basis_change_conjugates_exactly() {
        for from in Letter::ALL {
            for to in Letter::ALL {
                if from == to {
                    continue;
                }
                let (axis, alpha) = basis_change(from, to);
                let mut c = Circuit::new();
                c.push(Gate::rotation(0, axis, alpha)).unwrap();
                let v = c.unitary(1).unwrap();
                let f = PauliSum::from(PauliString::single(0, from)).dense(1).unwrap();
                let t = PauliSum::from(PauliString::single(0, to)).dense(1).unwrap();
                assert!((&v * f * v.adjoint() - t).camax() < 1e-14, "{from:?}->{to:?}");
            }
        }
    }

    #[test]
    fn collective_examples() {
        for s in ["(0.5) X0 Y2 Z3 Y4 X5", "(-0.5) Y0 Z1 Y2 X3 Y4 Y5", "(1) Z0 Z1", "(2) X1 X3 X4"] {
            let m = p(s);
            let c = compile_collective(&m, 0.7).unwrap();
            assert_eq!(c.counts().collective, 2);
            assert!(c.counts().single <= 2 * m.weight() + 1);
            assert!(verify(&c, &[m], 0.7).unwrap() < 1e-9, "{s}");
        }
    }

    #[test]
    fn cphase_examples() {
        for s in ["(0.5) X0 X2 X4", "(-0.5) Y0 Z1 Y2 X3 Y4 Y5", "(1) Z0 Y1", "(0.3) Y1 Y3 X4 Z5"] {
            let m = p(s);
            let c = compile_cphase(&m, 0.1, 6).unwrap();
            assert_eq!(c.counts().cphase, 2 * m.weight());
            assert!(c.counts().single <= 6 * m.weight() + 1);
            assert!(verify(&c, &[m], 0.1).unwrap() < 1e-9, "{s}");
        }
    }

    #[test]
    fn ancilla_below_support() {
        let m = p("(1) X1 Y3");
        let c = compile_cphase(&m, 0.4, 0).unwrap();
        assert!(verify(&c, &[m], 0.4).unwrap() < 1e-9);
        assert!(matches!(compile_cphase(&p("X0 Z2"), 0.1, 2), Err(Error::AncillaCollision(2))));
    }

    #[test]
    fn low_weight_strings() {
        let c = compile_collective(&p("(0.5) Y3"), 0.2).unwrap();
        assert_eq!(c.gates(), &[Gate::rotation(3, Letter::Y, 0.1)]);
        let id = PauliString::identity(2.0);
        assert!(compile_cphase(&id, 0.2, 0).unwrap().gates().is_empty());
        assert!(compile_collective(&p("(0+1i) X0 X1"), 0.2).is_err());
    }

    #[test]
    fn mixed_parity_step() {
        let ms = vec![p("(0.5) X0 X1 X2"), p("(-0.5) Z0 Y1"), p("(0.25) Y0 Y2"), p("(1) Z1 X2 Y3")];
        for gates in [GateSet::Collective, GateSet::Cphase] {
            let c = compile_step(&ms, 0.3, gates, None).unwrap();
            assert_eq!(c.counts(), c.recount());
            assert!(verify(&c, &ms, 0.3).unwrap() < 1e-9, "{gates}");
        }
    }
}
