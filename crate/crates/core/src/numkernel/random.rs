//! Random test objects: Gaussian matrices, Haar-like unitaries and isometries.

use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{norm, ComplexMatrix, C64};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Unit vector with i.i.d. complex Gaussian components before normalization.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    let s = norm(&v);
    v.into_iter().map(|z| z / s).collect()
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_matrix(n, n, rng);
    ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)].conj()))
}

/// `rows x cols` matrix with orthonormal columns (`rows >= cols`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "an isometry needs rows >= cols");
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian(rng)).collect();
        // Two Gram-Schmidt passes keep orthogonality at rounding level.
        for _ in 0..2 {
            for q in &columns {
                let overlap: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= overlap * y;
                }
            }
        }
        let s = norm(&v);
        if s > 1e-8 {
            columns.push(v.into_iter().map(|z| z / s).collect());
        }
    }
    ComplexMatrix::from_columns(&columns).expect("columns share a length")
}

pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(n, n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn isometry_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v = random_isometry(40, 9, &mut rng);
        let g = v.adjoint().matmul(&v);
        assert!(g.max_abs_diff(&ComplexMatrix::identity(9)) < 1e-13);
        assert!(random_unitary(12, &mut rng).unitarity_defect() < 1e-13);
    }

    #[test]
    fn state_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((norm(&random_state(17, &mut rng)) - 1.0).abs() < 1e-14);
    }
}
