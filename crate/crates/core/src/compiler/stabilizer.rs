//! Sign and axis tables for the collective and ancilla-mediated sandwiches
//!
//! `U_S(t) = e^{i(pi/4) sum_{i<j} X_i X_j} e^{i t Z_1} e^{-i(pi/4) sum_{i<j} X_i X_j}`
//! `U_SA(t) = e^{i(pi/4) Z_A sum_j Z_j} e^{-i t X_A} e^{-i(pi/4) Z_A sum_j Z_j}`
//!
//! which equal `exp(i s_N t P)` for an `N`-qubit string `P` read off the tables.

use crate::error::Result;
use crate::linalg::{expi_hermitian, CMatrix};
use crate::pauli::{Letter, PauliString, PauliSum};

/// `+1` for `N mod 4` in {1, 2}, `-1` for {0, 3}.
pub fn sandwich_sign(n: usize) -> f64 {
    match n % 4 {
        1 | 2 => 1.0,
        _ => -1.0,
    }
}

/// Letter on qubit 1 of the collective sandwich, the rest carrying `X`:
/// `Y` for even `N`, `Z` for odd `N`.
pub fn collective_head(n: usize) -> Letter {
    if n.is_multiple_of(2) {
        Letter::Y
    } else {
        Letter::Z
    }
}

/// Ancilla letter of the C-phase sandwich, the system carrying `Z` on every
/// qubit: `X` for even `N`, `Y` for odd `N`.
pub fn ancilla_axis(n: usize) -> Letter {
    if n.is_multiple_of(2) {
        Letter::X
    } else {
        Letter::Y
    }
}

fn xx_sum(qubits: &[usize]) -> PauliSum {
    let mut terms = Vec::new();
    for (k, &a) in qubits.iter().enumerate() {
        for &b in &qubits[k + 1..] {
            terms.push(PauliString::from_letters([(a, Letter::X), (b, Letter::X)]));
        }
    }
    PauliSum::from_terms(terms)
}

fn dense(p: PauliString, n: usize) -> Result<CMatrix> {
    PauliSum::from(p).dense(n)
}

/// Largest element deviation between `U_S(theta)` on qubits `0..n` and
/// `exp(i s_N theta H_0 X_1 ... X_{n-1})`.
pub fn collective_sandwich_deviation(n: usize, theta: f64) -> Result<f64> {
    let qubits: Vec<usize> = (0..n).collect();
    let s = xx_sum(&qubits).dense(n)?;
    let z = dense(PauliString::single(0, Letter::Z), n)?;
    let u = expi_hermitian(&s, std::f64::consts::FRAC_PI_4)?
        * expi_hermitian(&z, theta)?
        * expi_hermitian(&s, -std::f64::consts::FRAC_PI_4)?;
    let p = PauliString::from_letters(std::iter::once((0, collective_head(n))).chain((1..n).map(|q| (q, Letter::X))));
    let want = expi_hermitian(&dense(p, n)?, sandwich_sign(n) * theta)?;
    Ok((u - want).camax())
}

/// Largest element deviation between `U_SA(theta)` with system qubits `0..n`
/// and ancilla `n`, and `exp(i s_N theta A_n Z_0 ... Z_{n-1})`.
pub fn ancilla_sandwich_deviation(n: usize, theta: f64) -> Result<f64> {
    let a = n;
    let width = n + 1;
    let zz = PauliSum::from_terms((0..n).map(|j| PauliString::from_letters([(a, Letter::Z), (j, Letter::Z)])));
    let zz = zz.dense(width)?;
    let x = dense(PauliString::single(a, Letter::X), width)?;
    let u = expi_hermitian(&zz, std::f64::consts::FRAC_PI_4)?
        * expi_hermitian(&x, -theta)?
        * expi_hermitian(&zz, -std::f64::consts::FRAC_PI_4)?;
    let p = PauliString::from_letters(std::iter::once((a, ancilla_axis(n))).chain((0..n).map(|q| (q, Letter::Z))));
    let want = expi_hermitian(&dense(p, width)?, sandwich_sign(n) * theta)?;
    Ok((u - want).camax())
}

/// `(N, head letter, sign)` rows of the collective table for `N` in a range.
pub fn collective_table(ns: impl IntoIterator<Item = usize>) -> Vec<(usize, Letter, f64)> {
    ns.into_iter().map(|n| (n, collective_head(n), sandwich_sign(n))).collect()
}

/// `(N, ancilla letter, sign)` rows of the ancilla table.
pub fn ancilla_table(ns: impl IntoIterator<Item = usize>) -> Vec<(usize, Letter, f64)> {
    ns.into_iter().map(|n| (n, ancilla_axis(n), sandwich_sign(n))).collect()
}
