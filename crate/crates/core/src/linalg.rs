//! Dense complex linear algebra used by the evolution and validation code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity tolerance relative to the largest matrix element.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Spectral decomposition `H = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn of(h: &CMatrix) -> Result<Self> {
        let deviation = hermiticity_defect(h);
        let scale = h.camax().max(1.0);
        if deviation > HERMITIAN_TOLERANCE * scale {
            return Err(Error::NotHermitian { deviation });
        }
        // symmetrize so the solver sees an exactly Hermitian input
        let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors =
            CMatrix::from_columns(&order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect::<Vec<_>>());
        Ok(Spectrum { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `f(H)` for a scalar function applied to the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let d = CVector::from_iterator(self.dim(), self.values.iter().map(|&x| f(x)));
        let scaled = &self.vectors * CMatrix::from_diagonal(&d);
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i H t) psi`.
    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        let v = CVector::from_column_slice(psi);
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, &e) in coeffs.iter_mut().zip(&self.values) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        (&self.vectors * coeffs).as_slice().to_vec()
    }

    /// Eigenvalue clusters `(mean value, column indices)` with gaps above `tol`.
    pub fn clusters(&self, tol: f64) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (k, &v) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some((_, idx)) if (v - self.values[*idx.last().unwrap()]).abs() <= tol => idx.push(k),
                _ => out.push((v, vec![k])),
            }
        }
        for (mean, idx) in &mut out {
            *mean = idx.iter().map(|&k| self.values[k]).sum::<f64>() / idx.len() as f64;
        }
        out
    }

    /// Projector onto the span of the given eigenvector columns.
    pub fn projector(&self, columns: &[usize]) -> CMatrix {
        let n = self.dim();
        let mut p = CMatrix::zeros(n, n);
        for &k in columns {
            let v = self.vectors.column(k);
            p += v * v.adjoint();
        }
        p
    }
}

pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    (h - h.adjoint()).camax()
}

/// `exp(i alpha A)` for Hermitian `A`.
pub fn expi_hermitian(a: &CMatrix, alpha: f64) -> Result<CMatrix> {
    Ok(Spectrum::of(a)?.map(|x| Complex64::from_polar(1.0, alpha * x)))
}

/// Operator (spectral) norm: largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    let eig = ((&gram + gram.adjoint()) * Complex64::new(0.5, 0.0)).symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
}

/// `max |a - e^{i gamma} b|` minimized over the global phase estimated from
/// the overlap `tr(b^dagger a)`.
pub fn max_deviation_up_to_phase(a: &CMatrix, b: &CMatrix) -> f64 {
    let overlap: Complex64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
    (a - b * phase).camax()
}

/// `max |U^dagger U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    (u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols())).camax()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectrum_reconstructs_matrix() {
        let h = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2., 0.),
                c(0., 1.),
                c(0.5, 0.),
                c(0., -1.),
                c(-1., 0.),
                c(0., 0.3),
                c(0.5, 0.),
                c(0., -0.3),
                c(0.2, 0.),
            ],
        );
        let s = Spectrum::of(&h).unwrap();
        assert!((s.map(|x| c(x, 0.0)) - &h).camax() < 1e-12);
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(unitarity_defect(&s.vectors) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(Spectrum::of(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn clusters_group_degenerate_levels() {
        let h = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1., 0.), c(0.75, 0.), c(1.0 + 1e-10, 0.), c(3., 0.)]));
        let cl = Spectrum::of(&h).unwrap().clusters(1e-8);
        let sizes: Vec<usize> = cl.iter().map(|(_, i)| i.len()).collect();
        assert_eq!(sizes, vec![1, 2, 1]);
    }

    #[test]
    fn phase_insensitive_comparison() {
        let a = CMatrix::identity(2, 2);
        let b = &a * Complex64::from_polar(1.0, 0.7);
        assert!(max_deviation_up_to_phase(&a, &b) < 1e-15);
        assert!((operator_norm(&(a * c(3.0, 0.0))) - 3.0).abs() < 1e-12);
    }
}
