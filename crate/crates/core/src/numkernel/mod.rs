//! Dense complex linear algebra: matrices, Hermitian and unitary
//! eigendecompositions, operator norms and von Neumann entropy.

mod hermitian;
mod matrix;
mod norm;
pub mod random;
mod unitary;

pub use hermitian::{hermitian_eig, HERMITIAN_TOL};
pub use matrix::{dft_matrix, dot, norm, norm_sqr, normalized, ComplexMatrix, C64, ONE, ZERO};
pub use norm::{operator_norm, operator_norm_exact};
pub use unitary::{unitary_eig, UNITARY_TOL};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, a square matrix is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |H - H†| = {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not unitary (max |U†U - I| = {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("density matrix has eigenvalue {value:.3e} below the admissible floor")]
    NegativeEigenvalue { value: f64 },
    #[error("density matrix trace {trace:.12} differs from 1")]
    TraceNotOne { trace: f64 },
    #[error("{what} did not converge within {iterations} iterations")]
    NotConverged {
        what: &'static str,
        iterations: usize,
    },
    #[error("eigendecomposition residual {residual:.3e} exceeds tolerance")]
    ResidualTooLarge { residual: f64 },
}

/// Eigenvalues with the matching orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<C64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn new(eigenvalues: Vec<C64>, eigenvectors: ComplexMatrix) -> Self {
        debug_assert_eq!(eigenvalues.len(), eigenvectors.cols());
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `V diag(lambda) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for i in 0..v.rows() {
            for j in 0..v.cols() {
                scaled[(i, j)] *= self.eigenvalues[j];
            }
        }
        scaled.matmul(&v.adjoint())
    }

    /// Largest `|A v - lambda v|` over all pairs.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        (0..self.len())
            .map(|j| {
                let v = self.eigenvectors.column(j);
                let av = a.matvec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - self.eigenvalues[j] * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V†V - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        self.eigenvectors.unitarity_defect()
    }
}

/// Floor below which a density-matrix eigenvalue is an error rather than rounding.
pub const NEGATIVE_EIGENVALUE_FLOOR: f64 = -1e-8;
pub const DENSITY_TRACE_TOL: f64 = 1e-8;
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;

/// `-sum lambda log lambda` over the spectrum of a density matrix.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64, NumError> {
    if !rho.is_square() {
        return Err(NumError::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    let asymmetry = rho.hermiticity_defect();
    if asymmetry > DENSITY_HERMITIAN_TOL {
        return Err(NumError::NotHermitian { asymmetry });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
        return Err(NumError::TraceNotOne { trace });
    }
    let (values, _) = hermitian::jacobi(rho)?;
    spectrum_entropy(&values)
}

/// Entropy of a spectrum, clipping tiny negative rounding to zero.
pub fn spectrum_entropy(values: &[f64]) -> Result<f64, NumError> {
    let mut h = 0.0;
    for &lambda in values {
        if lambda < NEGATIVE_EIGENVALUE_FLOOR {
            return Err(NumError::NegativeEigenvalue { value: lambda });
        }
        if lambda > 0.0 {
            h -= lambda * lambda.ln();
        }
    }
    Ok(h)
}

/// Ascending eigenvalues only, skipping the eigenvector bookkeeping.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>, NumError> {
    hermitian_eig(h).map(|d| d.real_eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_of_pure_projector_is_zero() {
        let psi = normalized(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-0.5, 0.5)]);
        let rho = ComplexMatrix::from_fn(3, 3, |i, j| psi[i] * psi[j].conj());
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_of_maximally_mixed() {
        for d in [2usize, 5, 16] {
            let rho = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
            let h = von_neumann_entropy(&rho).unwrap();
            assert!((h - (d as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_of_three_quarters() {
        let rho = ComplexMatrix::from_real_diag(&[0.75, 0.25]);
        let h = von_neumann_entropy(&rho).unwrap();
        let expected = -0.75 * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((h - expected).abs() < 1e-14);
        assert!((h - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        let rho = ComplexMatrix::from_real_diag(&[1.1, -0.1]);
        assert!(matches!(
            von_neumann_entropy(&rho),
            Err(NumError::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn entropy_clips_rounding_noise() {
        assert_eq!(spectrum_entropy(&[1.0, -1e-12]).unwrap(), 0.0);
    }

    #[test]
    fn entropy_rejects_bad_trace() {
        let rho = ComplexMatrix::from_real_diag(&[0.5, 0.4]);
        assert!(matches!(
            von_neumann_entropy(&rho),
            Err(NumError::TraceNotOne { .. })
        ));
    }
}
