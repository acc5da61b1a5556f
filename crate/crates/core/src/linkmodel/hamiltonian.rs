use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::layout::PlaquetteLayout;
use super::operators::gamma;
use crate::error::Result;
use crate::pauli::{PauliString, PauliSum};

/// One term of the plaquette expansion: `coefficient * Gamma^i Gamma^j Gamma^k`
/// over the plaquette's three links in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub plaquette: usize,
    pub indices: [usize; 3],
    pub term: PauliString,
}

impl Monomial {
    /// Label such as `G0.Gx.Gx`.
    pub fn label(&self) -> String {
        let name = |k: usize| ["G0", "Gx", "Gy", "Gz"][k];
        let [a, b, c] = self.indices;
        format!("{}.{}.{}", name(a), name(b), name(c))
    }
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1.0,
        (1, 3, 2) | (3, 2, 1) | (2, 1, 3) => -1.0,
        _ => 0.0,
    }
}

/// Index triples and braced-sum signs in listing order: the all-`Gamma^0`
/// term, the six Levi-Civita terms in lexicographic order, then the nine mixed
/// terms with the color index outermost.
fn expansion() -> Vec<([usize; 3], f64)> {
    let mut out = vec![([0, 0, 0], 1.0)];
    for a in 1..=3 {
        for b in 1..=3 {
            for c in 1..=3 {
                let e = levi_civita(a, b, c);
                if e != 0.0 {
                    out.push(([a, b, c], e));
                }
            }
        }
    }
    for a in 1..=3 {
        out.push(([0, a, a], -1.0));
        out.push(([a, 0, a], -1.0));
        out.push(([a, a, 0], -1.0));
    }
    out
}

/// The 16 monomials of every plaquette, in listing order, with coefficients
/// `-J/2` times the sign in the braced sum.
pub fn plaquette_monomials(layout: &PlaquetteLayout, j: f64) -> Result<Vec<Monomial>> {
    let mut out = Vec::new();
    for (p, links) in layout.plaquettes().iter().enumerate() {
        for (indices, sign) in expansion() {
            let mut term = PauliString::identity(1.0);
            for (link, &k) in links.iter().zip(&indices) {
                term = term.multiply(&gamma(layout, *link, k)?);
            }
            let Some(term) = term.scaled(Complex64::new(-0.5 * j * sign, 0.0)) else {
                continue;
            };
            out.push(Monomial { plaquette: p, indices, term });
        }
    }
    Ok(out)
}

/// `H = -J/2 { G0G0G0 + sum eps_abc GaGbGc - sum_a [G0GaGa + GaG0Ga + GaGaG0] }`
/// summed over all plaquettes of the layout.
pub fn plaquette_hamiltonian(layout: &PlaquetteLayout, j: f64) -> Result<PauliSum> {
    Ok(PauliSum::from_terms(plaquette_monomials(layout, j)?.into_iter().map(|m| m.term)))
}

/// Number of terms per Pauli weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census(pub BTreeMap<usize, usize>);

pub fn census(h: &PauliSum) -> Census {
    let mut map = BTreeMap::new();
    for t in h.terms() {
        *map.entry(t.weight()).or_insert(0) += 1;
    }
    Census(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linkmodel::layout::Link;

    #[test]
    fn sixteen_terms_with_census() {
        let t = PlaquetteLayout::triangle();
        let h = plaquette_hamiltonian(&t, 1.0).unwrap();
        assert_eq!(h.len(), 16);
        assert_eq!(census(&h).0, BTreeMap::from([(3, 1), (5, 9), (6, 6)]));
        for term in h.terms() {
            assert!((term.coefficient().norm() - 0.5).abs() < 1e-15);
            assert_eq!(term.coefficient().im, 0.0);
        }
    }

    #[test]
    fn three_body_term() {
        let t = PlaquetteLayout::triangle();
        let m = plaquette_monomials(&t, 2.0).unwrap();
        assert_eq!(m[0].term.to_string(), "(-1) X0 X2 X4");
        assert_eq!(m[0].label(), "G0.G0.G0");
        assert_eq!(m[1].label(), "Gx.Gy.Gz");
        assert_eq!(m[7].label(), "G0.Gx.Gx");
        assert_eq!(m[15].label(), "Gz.Gz.G0");
    }

    #[test]
    fn mixed_terms_carry_positive_sign() {
        let t = PlaquetteLayout::triangle();
        let m = plaquette_monomials(&t, 1.0).unwrap();
        assert!(m[7..].iter().all(|x| x.term.coefficient().re == 0.5));
        assert_eq!(m[1].term.coefficient().re, -0.5);
        assert_eq!(m[2].term.coefficient().re, 0.5);
    }

    #[test]
    fn hermitian_and_traceless() {
        let t = PlaquetteLayout::triangle();
        let d = plaquette_hamiltonian(&t, 1.3).unwrap().dense(6).unwrap();
        assert!(crate::linalg::hermiticity_defect(&d) < 1e-12);
        assert!(d.trace().norm() < 1e-12);
    }

    #[test]
    fn plaquette_list_sums() {
        let link = |id, from, to, position, spin| Link { id, from, to, position, spin };
        let two = PlaquetteLayout::new(
            &[1, 2, 3, 4],
            vec![
                link(12, 1, 2, 0, 1),
                link(23, 2, 3, 2, 3),
                link(31, 3, 1, 4, 5),
                link(34, 3, 4, 6, 7),
                link(42, 4, 2, 8, 9),
            ],
            vec![[12, 23, 31], [23, 34, 42]],
        )
        .unwrap();
        let h = plaquette_hamiltonian(&two, 1.0).unwrap();
        assert_eq!(h.len(), 32);
        assert_eq!(census(&h).0, BTreeMap::from([(3, 2), (5, 18), (6, 12)]));
    }

    #[test]
    fn open_plaquette_rejected() {
        let link = |id, from, to, position, spin| Link { id, from, to, position, spin };
        let r = PlaquetteLayout::new(
            &[1, 2, 3],
            vec![link(12, 1, 2, 0, 1), link(23, 2, 3, 2, 3), link(13, 1, 3, 4, 5)],
            vec![[12, 23, 13]],
        );
        assert!(matches!(r, Err(Error::OpenPlaquette(_))));
    }
}
