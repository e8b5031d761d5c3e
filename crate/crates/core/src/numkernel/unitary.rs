//! Eigendecomposition of unitary matrices through a random Hermitian combination.
//!
//! For a unitary `U` and an angle `theta`, the matrix
//! `H = cos(theta)(U + U†)/2 + sin(theta)(U - U†)/(2i)` is Hermitian, commutes
//! with `U`, and maps the eigenvalue `e^{i phi}` to `cos(phi - theta)`. Clusters of
//! nearly equal `H` eigenvalues may mix different `U` eigenvalues; each such
//! cluster is re-diagonalized by restricting `U` to its span with a fresh angle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hermitian::jacobi;
use super::matrix::{norm, ComplexMatrix, C64};
use super::{NumError, SpectralDecomposition};

pub const UNITARY_TOL: f64 = 1e-10;
/// Consecutive `H(theta)` eigenvalues closer than this are treated as one cluster.
const CLUSTER_GAP: f64 = 1e-6;
/// A restricted block this close to a multiple of the identity is already diagonal.
const SCALAR_BLOCK_TOL: f64 = 1e-11;
const RESIDUAL_TOL: f64 = 1e-8;
const MAX_ATTEMPTS: usize = 6;
const MAX_DEPTH: usize = 12;

pub fn unitary_eig(u: &ComplexMatrix, seed: u64) -> Result<SpectralDecomposition, NumError> {
    if !u.is_square() {
        return Err(NumError::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(NumError::NotUnitary { defect });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ATTEMPTS {
        let vectors = diagonalize(u, &mut rng, 0)?;
        let decomposition = finish(u, vectors);
        worst = decomposition.max_residual(u);
        if worst <= RESIDUAL_TOL {
            return Ok(decomposition);
        }
    }
    Err(NumError::ResidualTooLarge { residual: worst })
}

/// Orthonormal eigenvector columns of a (numerically) unitary matrix.
fn diagonalize(
    u: &ComplexMatrix,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> Result<ComplexMatrix, NumError> {
    let n = u.rows();
    if n == 1 {
        return Ok(ComplexMatrix::identity(1));
    }
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let minus_half_i = C64::new(0.0, -0.5);
    let h = ComplexMatrix::from_fn(n, n, |i, j| {
        let uij = u[(i, j)];
        let uji_c = u[(j, i)].conj();
        cos_t * 0.5 * (uij + uji_c) + sin_t * minus_half_i * (uij - uji_c)
    });
    let (values, mut vectors) = jacobi(&h)?;
    if depth >= MAX_DEPTH {
        return Ok(vectors);
    }

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            let idx: Vec<usize> = (start..end).collect();
            let basis = vectors.select_columns(&idx);
            let block = basis.adjoint().matmul(u).matmul(&basis);
            if !is_scalar(&block) {
                let inner = diagonalize(&block, rng, depth + 1)?;
                let refined = basis.matmul(&inner);
                for (local, &col) in idx.iter().enumerate() {
                    vectors.set_column(col, &refined.column(local));
                }
            }
        }
        start = end;
    }
    Ok(vectors)
}

fn is_scalar(block: &ComplexMatrix) -> bool {
    let m = block.rows();
    let mean = block.trace() / m as f64;
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let target = if i == j { mean } else { C64::new(0.0, 0.0) };
            worst = worst.max((block[(i, j)] - target).norm());
        }
    }
    worst <= SCALAR_BLOCK_TOL
}

/// Rayleigh eigenvalues, sorted by eigenphase in `[0, 2 pi)`.
fn finish(u: &ComplexMatrix, vectors: ComplexMatrix) -> SpectralDecomposition {
    let n = u.rows();
    let mut pairs: Vec<(f64, C64, Vec<C64>)> = (0..n)
        .map(|j| {
            let v = vectors.column(j);
            let uv = u.matvec(&v);
            let lambda: C64 =
                v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum::<C64>() / norm(&v).powi(2);
            let phase = lambda.arg().rem_euclid(std::f64::consts::TAU);
            (phase, lambda, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eigenvalues = pairs.iter().map(|p| p.1).collect();
    let columns: Vec<Vec<C64>> = pairs.into_iter().map(|p| p.2).collect();
    SpectralDecomposition::new(
        eigenvalues,
        ComplexMatrix::from_columns(&columns).expect("square"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::matrix::dft_matrix;
    use crate::numkernel::random::random_unitary;

    #[test]
    fn diagonal_phases() {
        let u = ComplexMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let d = unitary_eig(&u, 1).unwrap();
        let phases: Vec<f64> = d
            .eigenvalues()
            .iter()
            .map(|z| z.arg().rem_euclid(std::f64::consts::TAU))
            .collect();
        assert!(phases[0].abs() < 1e-12);
        assert!((phases[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_dft_has_plus_minus_one() {
        let d = unitary_eig(&dft_matrix(2), 4).unwrap();
        for z in d.eigenvalues() {
            let near_plus = (z - C64::new(1.0, 0.0)).norm() < 1e-12;
            let near_minus = (z + C64::new(1.0, 0.0)).norm() < 1e-12;
            assert!(near_plus || near_minus, "{z}");
        }
    }

    #[test]
    fn degenerate_dft_spectrum_resolves() {
        // The DFT has only four distinct eigenvalues, so every cluster is degenerate.
        let f = dft_matrix(24);
        let d = unitary_eig(&f, 7).unwrap();
        assert!(d.max_residual(&f) < 1e-10);
        assert!(d.orthonormality_defect() < 1e-10);
        assert!(d.reconstruct().max_abs_diff(&f) < 1e-9);
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(12, &mut rng);
        let a = unitary_eig(&u, 5).unwrap();
        let b = unitary_eig(&u, 5).unwrap();
        assert_eq!(a.eigenvectors(), b.eigenvectors());
    }

    #[test]
    fn rejects_non_unitary() {
        let m = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
        assert!(matches!(
            unitary_eig(&m, 0),
            Err(NumError::NotUnitary { .. })
        ));
    }

    #[test]
    fn eigenvectors_diagonalize_polynomials() {
        let f = dft_matrix(16);
        let d = unitary_eig(&f, 2).unwrap();
        let f2 = f.matmul(&f);
        let poly = &(&f2 + &f.scale(C64::new(3.0, 0.0))) + &ComplexMatrix::identity(16);
        let v = d.eigenvectors();
        let t = v.adjoint().matmul(&poly).matmul(v);
        let mut off = 0.0f64;
        for i in 0..16 {
            for j in 0..16 {
                if i != j {
                    off = off.max(t[(i, j)].norm());
                }
            }
        }
        assert!(off < 1e-8);
    }
}
