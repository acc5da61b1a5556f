//! Link operators, left/right generators and vertex gauge generators in the
//! two-qubit (position, spin) encoding of a single-excitation SU(2) link.
//!
//! Position qubit `Z = +1` means the excitation sits at the R end of the link
//! and `Z = -1` at the L end. The spin qubit carries the color doublet.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::layout::{End, PlaquetteLayout};
use crate::error::{Error, Result};
use crate::linalg::{expi_hermitian, CMatrix};
use crate::pauli::{Letter, PauliString, PauliSum};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn color_letter(a: usize) -> Result<Letter> {
    Letter::from_color(a).ok_or_else(|| Error::InvalidParameter(format!("color index {a} not in 1..=3")))
}

/// `Gamma^0 = X_pos`, `Gamma^a = Y_pos sigma^a_spin` for `a` in 1..=3.
pub fn gamma(layout: &PlaquetteLayout, link: u32, index: usize) -> Result<PauliString> {
    let l = layout.link(link)?;
    if index == 0 {
        return Ok(PauliString::single(l.position, Letter::X));
    }
    let a = color_letter(index)?;
    Ok(PauliString::from_letters([(l.position, Letter::Y), (l.spin, a)]))
}

/// `(1 +/- Z_pos)/2 * sigma^a_spin / 2`.
fn end_generator(position: usize, spin: usize, a: Letter, end: End) -> PauliSum {
    let s = match end {
        End::R => 0.25,
        End::L => -0.25,
    };
    PauliSum::from_terms([
        PauliString::single(spin, a).scaled(re(0.25)).unwrap(),
        PauliString::from_letters([(position, Letter::Z), (spin, a)]).scaled(re(s)).unwrap(),
    ])
}

/// Left and right generators `(L^a, R^a)` for a = x, y, z.
pub fn left_right_generators(layout: &PlaquetteLayout, link: u32) -> Result<([PauliSum; 3], [PauliSum; 3])> {
    let l = layout.link(link)?;
    let gen = |end| Letter::ALL.map(|a| end_generator(l.position, l.spin, a, end));
    Ok((gen(End::L), gen(End::R)))
}

/// Color components `U[alpha][beta] = (Gamma^0 delta + i sum_a Gamma^a sigma^a)/2`.
pub fn link_operator(layout: &PlaquetteLayout, link: u32) -> Result<[[PauliSum; 2]; 2]> {
    let g: Vec<PauliString> = (0..4).map(|k| gamma(layout, link, k)).collect::<Result<_>>()?;
    let half = re(0.5);
    let i_half = Complex64::new(0.0, 0.5);
    let component = |alpha: usize, beta: usize| {
        let mut terms = Vec::new();
        if alpha == beta {
            terms.push(g[0].scaled(half).unwrap());
        }
        for (k, a) in Letter::ALL.iter().enumerate() {
            let m = a.matrix()[alpha][beta];
            if let Some(t) = g[k + 1].scaled(i_half * m) {
                terms.push(t);
            }
        }
        PauliSum::from_terms(terms)
    };
    Ok([[component(0, 0), component(0, 1)], [component(1, 0), component(1, 1)]])
}

/// `G^a(v)`: R^a of links ending at `v` plus L^a of links starting at `v`.
pub fn gauge_generator(layout: &PlaquetteLayout, vertex: u32, a: usize) -> Result<PauliSum> {
    let letter = color_letter(a)?;
    let v = layout.vertex(vertex)?;
    let mut acc = PauliSum::zero();
    for &(id, end) in &v.incident {
        let l = layout.link(id)?;
        acc = acc.add(&end_generator(l.position, l.spin, letter, end));
    }
    Ok(acc)
}

/// `sum_v sum_a G^a(v)^2`, whose eigenvalues label the gauge sectors.
pub fn total_casimir(layout: &PlaquetteLayout) -> Result<PauliSum> {
    let mut acc = PauliSum::zero();
    for v in layout.vertices() {
        for a in 1..=3 {
            let g = gauge_generator(layout, v.id, a)?;
            acc = acc.add(&g.multiply(&g));
        }
    }
    Ok(acc)
}

/// `exp(i theta . sigma / 2)` as a 2x2 color matrix.
pub fn color_rotation(theta: [f64; 3]) -> [[Complex64; 2]; 2] {
    let norm = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
    let (c, s) = ((norm / 2.0).cos(), (norm / 2.0).sin());
    let mut m = [[re(c), re(0.0)], [re(0.0), re(c)]];
    if norm > 0.0 {
        for (k, a) in Letter::ALL.iter().enumerate() {
            let p = a.matrix();
            let w = Complex64::new(0.0, s * theta[k] / norm);
            for (r, row) in m.iter_mut().enumerate() {
                for (col, x) in row.iter_mut().enumerate() {
                    *x += w * p[r][col];
                }
            }
        }
    }
    m
}

fn dense_rotation(layout: &PlaquetteLayout, vertex: u32, theta: [f64; 3], n: usize) -> Result<CMatrix> {
    let mut gen = PauliSum::zero();
    for (k, t) in theta.iter().enumerate() {
        gen = gen.add(&gauge_generator(layout, vertex, k + 1)?.scale(re(*t)));
    }
    if gen.is_empty() {
        return Ok(CMatrix::identity(1 << n, 1 << n));
    }
    expi_hermitian(&gen.dense(n)?, 1.0)
}

/// Largest element-wise deviation between the two sides of the gauge
/// covariance relation
///
/// `W^dagger U(link) W = exp(i theta(tail).sigma/2) U exp(-i theta(head).sigma/2)`,
/// `W = prod_v exp(i theta(v).G(v))`, checked for every color component.
pub fn gauge_covariance_check(layout: &PlaquetteLayout, link: u32, angles: &BTreeMap<u32, [f64; 3]>) -> Result<f64> {
    let l = *layout.link(link)?;
    let n = layout.n_qubits();
    let dim = 1usize << n;
    let mut w = CMatrix::identity(dim, dim);
    for v in layout.vertices() {
        let theta =
            angles.get(&v.id).ok_or_else(|| Error::InvalidParameter(format!("no gauge angles for vertex {}", v.id)))?;
        w *= dense_rotation(layout, v.id, *theta, n)?;
    }
    let u = link_operator(layout, link)?;
    let ud: Vec<Vec<CMatrix>> =
        u.iter().map(|row| row.iter().map(|c| c.dense(n)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let left = color_rotation(angles[&l.from]);
    let right = color_rotation(angles[&l.to].map(|t| -t));
    let mut worst = 0.0f64;
    for alpha in 0..2 {
        for beta in 0..2 {
            let lhs = w.adjoint() * &ud[alpha][beta] * &w;
            let mut rhs = CMatrix::zeros(dim, dim);
            for (gamma, lrow) in left[alpha].iter().enumerate() {
                for (delta, rrow) in right.iter().enumerate() {
                    rhs += &ud[gamma][delta] * (*lrow * rrow[beta]);
                }
            }
            worst = worst.max((lhs - rhs).camax());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::commutator;

    fn triangle() -> PlaquetteLayout {
        PlaquetteLayout::triangle()
    }

    #[test]
    fn gamma_definitions() {
        let t = triangle();
        assert_eq!(gamma(&t, 12, 0).unwrap().to_string(), "(1) X0");
        assert_eq!(gamma(&t, 12, 3).unwrap().to_string(), "(1) Y0 Z1");
        assert_eq!(gamma(&t, 31, 2).unwrap().to_string(), "(1) Y4 Y5");
        assert!(matches!(gamma(&t, 99, 0), Err(Error::UnknownLink(99))));
        assert!(gamma(&t, 12, 4).is_err());
    }

    #[test]
    fn gamma_zero_anticommutes_with_gamma_z() {
        let t = triangle();
        let a = PauliSum::from(gamma(&t, 23, 0).unwrap()).dense(6).unwrap();
        let b = PauliSum::from(gamma(&t, 23, 3).unwrap()).dense(6).unwrap();
        assert!((&a * &b + &b * &a).camax() < 1e-14);
    }

    #[test]
    fn generator_matrix_elements() {
        let t = triangle();
        let (l, r) = left_right_generators(&t, 12).unwrap();
        // position qubit 0 = |0> (R occupied), spin qubit 1 = |0> (up)
        let psi = crate::StateVector::basis(6, 0);
        let rz = r[2].expectation(psi.amplitudes());
        let lz = l[2].expectation(psi.amplitudes());
        assert!((rz - re(0.5)).norm() < 1e-15);
        assert!(lz.norm() < 1e-15);
    }

    #[test]
    fn left_plus_right_is_spin() {
        let t = triangle();
        let (l, r) = left_right_generators(&t, 23).unwrap();
        for (k, a) in Letter::ALL.iter().enumerate() {
            let want = PauliSum::from(PauliString::single(3, *a)).scale(re(0.5));
            assert_eq!(l[k].add(&r[k]), want);
        }
    }

    #[test]
    fn vertex_generator_incidence() {
        let t = triangle();
        let (l23, _) = left_right_generators(&t, 23).unwrap();
        let (_, r12) = left_right_generators(&t, 12).unwrap();
        for a in 1..=3 {
            assert_eq!(gauge_generator(&t, 2, a).unwrap(), r12[a - 1].add(&l23[a - 1]));
        }
        assert!(matches!(gauge_generator(&t, 7, 1), Err(Error::UnknownVertex(7))));
    }

    #[test]
    fn link_operator_component() {
        let t = triangle();
        let u = link_operator(&t, 12).unwrap();
        assert_eq!(u[0][0].to_string(), "(0.5) X0 + (0+0.5i) Y0 Z1");
        // U_{01} = (i/2) Y_pos (X - iY)_spin
        assert_eq!(u[0][1].to_string(), "(0+0.5i) Y0 X1 + (0.5) Y0 Y1");
    }

    #[test]
    fn casimir_commutes_with_generators() {
        let t = triangle();
        let c = total_casimir(&t).unwrap().dense(6).unwrap();
        for v in [1, 2, 3] {
            for a in 1..=3 {
                let g = gauge_generator(&t, v, a).unwrap().dense(6).unwrap();
                assert!(commutator(&c, &g).camax() < 1e-12);
            }
        }
    }

    #[test]
    fn covariance_identity_and_disjoint_vertex() {
        let t = triangle();
        let zero: BTreeMap<u32, [f64; 3]> = [(1, [0.0; 3]), (2, [0.0; 3]), (3, [0.0; 3])].into();
        assert!(gauge_covariance_check(&t, 12, &zero).unwrap() < 1e-15);
        let mut only3 = zero.clone();
        only3.insert(3, [0.4, -1.3, 2.2]);
        assert!(gauge_covariance_check(&t, 12, &only3).unwrap() < 1e-12);
        let mut missing = zero;
        missing.remove(&2);
        assert!(gauge_covariance_check(&t, 12, &missing).is_err());
    }

    #[test]
    fn color_rotation_is_unitary() {
        let m = color_rotation([0.3, -1.2, 0.8]);
        let a = CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
        assert!(crate::linalg::unitarity_defect(&a) < 1e-14);
    }
}
