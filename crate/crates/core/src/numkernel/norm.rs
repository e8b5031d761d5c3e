//! Spectral (operator 2-) norms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hermitian::jacobi;
use super::matrix::{norm, ComplexMatrix, C64};

const MAX_ITERATIONS: usize = 10_000;
/// Fixed seed for the start vector, so the estimate is a function of `a` alone.
const START_SEED: u64 = 0x0005_eed0_fa11;

/// Largest singular value by power iteration on `A†A`, to relative accuracy `tol`.
///
/// The iteration is a Rayleigh-quotient lower bound; it stops once the
/// geometric extrapolation of the remaining increments falls below `tol`.
pub fn operator_norm(a: &ComplexMatrix, tol: f64) -> f64 {
    assert!(tol > 0.0, "operator_norm tolerance must be positive");
    if a.rows() == 0 || a.cols() == 0 || a.max_abs() == 0.0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED ^ (a.cols() as u64));
    let mut x: Vec<C64> = (0..a.cols())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let scale = norm(&x);
    x.iter_mut().for_each(|z| *z /= scale);

    let mut estimate = 0.0f64;
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let ax = a.matvec(&x);
        let sigma_sq = ax.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let mut y = a.adjoint_matvec(&ax);
        let ny = norm(&y);
        if ny == 0.0 {
            return sigma_sq.sqrt();
        }
        y.iter_mut().for_each(|z| *z /= ny);
        x = y;

        let step = sigma_sq - estimate;
        estimate = sigma_sq;
        if step.abs() <= f64::EPSILON * sigma_sq {
            break;
        }
        if last_step.is_finite() && step >= 0.0 && last_step > 0.0 {
            let ratio = step / last_step;
            if ratio < 1.0 {
                let remaining = step * ratio / (1.0 - ratio);
                // sigma^2 relative error tol gives sigma relative error ~tol/2.
                if remaining <= tol * sigma_sq {
                    break;
                }
            }
        }
        last_step = step;
    }
    estimate.sqrt()
}

/// Largest singular value from the full spectrum of the smaller Gram matrix.
pub fn operator_norm_exact(a: &ComplexMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 || a.max_abs() == 0.0 {
        return 0.0;
    }
    let gram = if a.rows() < a.cols() {
        a.matmul(&a.adjoint())
    } else {
        a.adjoint().matmul(a)
    };
    let (values, _) = jacobi(&gram).expect("Gram matrices are Hermitian");
    values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::random::{random_matrix, random_unitary};

    #[test]
    fn identity_norm() {
        assert!((operator_norm(&ComplexMatrix::identity(7), 1e-12) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_norm() {
        let a = ComplexMatrix::from_diag(&[C64::new(3.0, 0.0), C64::new(0.0, -4.0)]);
        assert!((operator_norm(&a, 1e-12) - 4.0).abs() < 1e-10);
        assert!((operator_norm_exact(&a) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(operator_norm(&ComplexMatrix::zeros(3, 3), 1e-9), 0.0);
    }

    #[test]
    fn random_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let a = random_matrix(8, 8, &mut rng);
            let p = operator_norm(&a, 1e-12);
            let e = operator_norm_exact(&a);
            assert!((p - e).abs() <= 1e-6 * e, "{p} vs {e}");
        }
    }

    #[test]
    fn adjoint_and_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(10, 6, &mut rng);
        let u = random_unitary(10, &mut rng);
        let n = operator_norm(&a, 1e-12);
        assert!((operator_norm(&a.adjoint(), 1e-12) - n).abs() < 1e-8 * n);
        assert!((operator_norm(&u.matmul(&a), 1e-12) - n).abs() < 1e-8 * n);
    }
}
