//! Pauli strings and weighted sums of them.
//!
//! Basis convention used everywhere in this crate: qubit 0 is the least
//! significant bit of a basis-state index, so `|b_{n-1} ... b_1 b_0>` has
//! index `sum_q b_q 2^q`, and bit value 0 is the `Z = +1` eigenstate.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register that [`PauliSum::dense`] will realize.
pub const DENSE_QUBIT_LIMIT: usize = 14;

/// Coefficients with modulus at or below this are dropped when merging terms.
pub const MERGE_TOLERANCE: f64 = 1e-12;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Non-identity single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    /// Letter for the SU(2) color index `a` in {1, 2, 3}.
    pub fn from_color(a: usize) -> Option<Letter> {
        match a {
            1 => Some(Letter::X),
            2 => Some(Letter::Y),
            3 => Some(Letter::Z),
            _ => None,
        }
    }

    /// Product of two letters as `(i^power, letter)`, where `None` is identity.
    pub fn mul(self, other: Letter) -> (u8, Option<Letter>) {
        use Letter::*;
        match (self, other) {
            (a, b) if a == b => (0, None),
            (X, Y) => (1, Some(Z)),
            (Y, Z) => (1, Some(X)),
            (Z, X) => (1, Some(Y)),
            (Y, X) => (3, Some(Z)),
            (Z, Y) => (3, Some(X)),
            (X, Z) => (3, Some(Y)),
            _ => unreachable!(),
        }
    }

    /// The remaining letter, for two distinct letters.
    pub fn third(self, other: Letter) -> Option<Letter> {
        self.mul(other).1
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Letter::X => [[ZERO, ONE], [ONE, ZERO]],
            Letter::Y => [[ZERO, -i], [i, ZERO]],
            Letter::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(Letter::X),
            "Y" | "y" => Ok(Letter::Y),
            "Z" | "z" => Ok(Letter::Z),
            _ => Err(Error::PauliParse { input: s.into(), reason: "expected X, Y or Z".into() }),
        }
    }
}

/// Multiply by `i^power` exactly (no rounding from complex multiplication).
pub(crate) fn mul_i_pow(c: Complex64, power: u8) -> Complex64 {
    match power % 4 {
        0 => c,
        1 => Complex64::new(-c.im, c.re),
        2 => Complex64::new(-c.re, -c.im),
        _ => Complex64::new(c.im, -c.re),
    }
}

/// A weighted tensor product of Pauli letters, stored sparsely.
///
/// Identity factors are never stored, and the coefficient is non-zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    coefficient: Complex64,
    letters: BTreeMap<usize, Letter>,
}

impl PauliString {
    pub fn new<I>(coefficient: Complex64, letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Letter)>,
    {
        if coefficient == ZERO {
            return Err(Error::ZeroCoefficient);
        }
        let mut s = PauliString { coefficient: ONE, letters: BTreeMap::new() };
        for (q, l) in letters {
            s = s.multiply(&PauliString::single(q, l));
        }
        s.coefficient *= coefficient;
        Ok(s)
    }

    /// `coefficient * I`.
    pub fn identity(coefficient: f64) -> Self {
        assert!(coefficient != 0.0, "identity coefficient must be non-zero");
        PauliString { coefficient: Complex64::new(coefficient, 0.0), letters: BTreeMap::new() }
    }

    pub fn single(qubit: usize, letter: Letter) -> Self {
        PauliString { coefficient: ONE, letters: BTreeMap::from([(qubit, letter)]) }
    }

    /// Unit-coefficient string from `(qubit, letter)` pairs on distinct qubits.
    pub fn from_letters<I: IntoIterator<Item = (usize, Letter)>>(letters: I) -> Self {
        PauliString::new(ONE, letters).expect("unit coefficient")
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    pub fn letters(&self) -> &BTreeMap<usize, Letter> {
        &self.letters
    }

    pub fn letter(&self, qubit: usize) -> Option<Letter> {
        self.letters.get(&qubit).copied()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.keys().copied()
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.letters.keys().next_back().copied()
    }

    pub fn scaled(&self, factor: Complex64) -> Option<Self> {
        let c = self.coefficient * factor;
        (c != ZERO).then(|| PauliString { coefficient: c, letters: self.letters.clone() })
    }

    /// Same letters with unit coefficient.
    pub fn unit(&self) -> Self {
        PauliString { coefficient: ONE, letters: self.letters.clone() }
    }

    pub fn adjoint(&self) -> Self {
        PauliString { coefficient: self.coefficient.conj(), letters: self.letters.clone() }
    }

    /// Exact operator product `self * other`.
    pub fn multiply(&self, other: &PauliString) -> PauliString {
        let mut letters = self.letters.clone();
        let mut power = 0u8;
        for (&q, &b) in &other.letters {
            match letters.get(&q).copied() {
                None => {
                    letters.insert(q, b);
                }
                Some(a) => {
                    let (p, l) = a.mul(b);
                    power += p;
                    match l {
                        Some(l) => letters.insert(q, l),
                        None => letters.remove(&q),
                    };
                }
            }
        }
        PauliString { coefficient: mul_i_pow(self.coefficient * other.coefficient, power), letters }
    }

    /// True when the two strings commute as operators.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self.letters.iter().filter(|(q, a)| other.letters.get(q).is_some_and(|b| b != *a)).count();
        anti % 2 == 0
    }

    /// `ab - ba`, which is either zero or `2ab`.
    pub fn commutator(&self, other: &PauliString) -> PauliSum {
        if self.commutes_with(other) {
            PauliSum::zero()
        } else {
            PauliSum::from_terms([self.multiply(other).scaled(Complex64::new(2.0, 0.0)).unwrap()])
        }
    }

    pub(crate) fn masks(&self) -> (usize, usize, u32) {
        let (mut flip, mut sign) = (0usize, 0usize);
        let mut n_y = 0u32;
        for (&q, &l) in &self.letters {
            match l {
                Letter::X => flip |= 1 << q,
                Letter::Y => {
                    flip |= 1 << q;
                    sign |= 1 << q;
                    n_y += 1;
                }
                Letter::Z => sign |= 1 << q,
            }
        }
        (flip, sign, n_y)
    }

    /// Adds `scale * self |psi>` into `out`.
    pub fn apply_add(&self, scale: Complex64, psi: &[Complex64], out: &mut [Complex64]) {
        let (flip, sign, n_y) = self.masks();
        let base = mul_i_pow(self.coefficient * scale, (n_y % 4) as u8);
        for (k, &amp) in psi.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let s = if (k & sign).count_ones() % 2 == 0 { base } else { -base };
            out[k ^ flip] += s * amp;
        }
    }

    /// `self |psi>`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; psi.len()];
        self.apply_add(ONE, psi, &mut out);
        out
    }

    fn key(&self) -> Vec<(usize, Letter)> {
        self.letters.iter().map(|(&q, &l)| (q, l)).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", format_complex(self.coefficient))?;
        for (q, l) in &self.letters {
            write!(f, " {}{}", l.as_char(), q)?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::PauliParse { input: s.to_string(), reason: reason.into() };
        let trimmed = s.trim();
        let (coefficient, rest) = if let Some(body) = trimmed.strip_prefix('(') {
            let close = body.find(')').ok_or_else(|| err("unclosed coefficient"))?;
            let c = parse_complex(&body[..close]).ok_or_else(|| err("bad coefficient"))?;
            (c, &body[close + 1..])
        } else {
            (ONE, trimmed)
        };
        if coefficient == ZERO {
            return Err(err("zero coefficient"));
        }
        let mut letters = Vec::new();
        for tok in rest.split_whitespace() {
            let mut chars = tok.chars();
            let letter = match chars.next() {
                Some('X') => Letter::X,
                Some('Y') => Letter::Y,
                Some('Z') => Letter::Z,
                Some('I') if tok == "I" => continue,
                Some('I') => {
                    chars.as_str().parse::<usize>().map_err(|_| err("bad qubit index"))?;
                    continue;
                }
                _ => return Err(err("expected X, Y, Z or I")),
            };
            let q: usize = chars.as_str().parse().map_err(|_| err("bad qubit index"))?;
            if letters.iter().any(|&(p, _)| p == q) {
                return Err(err("repeated qubit"));
            }
            letters.push((q, letter));
        }
        PauliString::new(coefficient, letters)
    }
}

fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))?;
    let re = body[..split].parse::<f64>().ok()?;
    let im = body[split..].parse::<f64>().ok()?;
    Some(Complex64::new(re, im))
}

/// Sum of Pauli strings with like terms merged and a canonical term order
/// (lexicographic by `(qubit, letter)` pattern).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn zero() -> Self {
        PauliSum { terms: Vec::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = PauliString>>(terms: I) -> Self {
        let mut acc: BTreeMap<Vec<(usize, Letter)>, (Complex64, BTreeMap<usize, Letter>)> = BTreeMap::new();
        for t in terms {
            let entry = acc.entry(t.key()).or_insert_with(|| (ZERO, t.letters.clone()));
            entry.0 += t.coefficient;
        }
        let terms = acc
            .into_values()
            .filter(|(c, _)| c.norm() > MERGE_TOLERANCE)
            .map(|(coefficient, letters)| PauliString { coefficient, letters })
            .collect();
        PauliSum { terms }
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.terms.iter().filter_map(PauliString::max_qubit).max()
    }

    pub fn add(&self, other: &PauliSum) -> PauliSum {
        PauliSum::from_terms(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn sub(&self, other: &PauliSum) -> PauliSum {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        PauliSum::from_terms(self.terms.iter().filter_map(|t| t.scaled(factor)))
    }

    pub fn multiply(&self, other: &PauliSum) -> PauliSum {
        PauliSum::from_terms(self.terms.iter().flat_map(|a| other.terms.iter().map(move |b| a.multiply(b))))
    }

    pub fn commutator(&self, other: &PauliSum) -> PauliSum {
        PauliSum::from_terms(
            self.terms.iter().flat_map(|a| other.terms.iter().flat_map(move |b| a.commutator(b).terms)),
        )
    }

    pub fn adjoint(&self) -> PauliSum {
        PauliSum::from_terms(self.terms.iter().map(PauliString::adjoint))
    }

    /// Largest termwise deviation between the sum and its adjoint.
    pub fn hermiticity_defect(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.im.abs() * 2.0).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `sum_k |c_k|`, a triangle-inequality bound on the operator norm.
    pub fn coefficient_one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).sum()
    }

    /// `self |psi>`.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; psi.len()];
        for t in &self.terms {
            t.apply_add(ONE, psi, &mut out);
        }
        out
    }

    /// `<psi| self |psi>`.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let h = self.apply(psi);
        psi.iter().zip(&h).map(|(a, b)| a.conj() * b).sum()
    }

    /// Dense `2^n x 2^n` matrix, qubit 0 = least significant bit.
    pub fn dense(&self, n_qubits: usize) -> Result<DMatrix<Complex64>> {
        if n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::DimensionGuard { requested: n_qubits, limit: DENSE_QUBIT_LIMIT });
        }
        if let Some(q) = self.max_qubit().filter(|&q| q >= n_qubits) {
            return Err(Error::SupportOutOfRange { qubit: q, n_qubits });
        }
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            let (flip, sign, n_y) = t.masks();
            let base = mul_i_pow(t.coefficient, (n_y % 4) as u8);
            for k in 0..dim {
                let s = if (k & sign).count_ones() % 2 == 0 { base } else { -base };
                m[(k ^ flip, k)] += s;
            }
        }
        Ok(m)
    }
}

impl From<PauliString> for PauliSum {
    fn from(s: PauliString) -> Self {
        PauliSum { terms: vec![s] }
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(PauliSum::zero());
        }
        let terms = s.split(" + ").map(str::parse).collect::<Result<Vec<PauliString>>>()?;
        Ok(PauliSum::from_terms(terms))
    }
}

/// Dense matrix of a single string.
pub fn dense_string(p: &PauliString, n_qubits: usize) -> Result<DMatrix<Complex64>> {
    PauliSum::from(p.clone()).dense(n_qubits)
}
