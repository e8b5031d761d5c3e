//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::{NumError, SpectralDecomposition};

/// Accepted Hermiticity defect, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Sweeps stop once the off-diagonal Frobenius mass drops below this fraction of `|H|_F`.
const OFF_DIAGONAL_THRESHOLD: f64 = 1e-13;
const MAX_SWEEPS: usize = 80;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<SpectralDecomposition, NumError> {
    if !h.is_square() {
        return Err(NumError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let scale = h.max_abs().max(1.0);
    let asymmetry = h.hermiticity_defect();
    if asymmetry > HERMITIAN_TOL * scale {
        return Err(NumError::NotHermitian { asymmetry });
    }
    let (values, vectors) = jacobi(h)?;
    Ok(SpectralDecomposition::new(
        values.into_iter().map(|v| C64::new(v, 0.0)).collect(),
        vectors,
    ))
}

/// Runs Jacobi on the Hermitian part of `h`; returns ascending eigenvalues and
/// the matching eigenvector columns.
pub(crate) fn jacobi(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix), NumError> {
    let n = h.rows();
    // Work on the exactly Hermitian part.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    // Rows of `vt` are the eigenvectors (transposed accumulation keeps updates contiguous).
    let mut vt = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();
    let target = OFF_DIAGONAL_THRESHOLD * total;

    let mut converged = n <= 1 || total == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(NumError::NotConverged {
                what: "Jacobi sweeps",
                iterations: MAX_SWEEPS,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut vt, p, q);
            }
        }
        converged = off_diagonal_norm(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |row, col| vt[(order[col], row)]);
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, vt: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Negligible coupling: drop it outright.
    if g_abs < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = g / g_abs; // e^{i phi}
    let theta = (aqq - app) / (2.0 * g_abs);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on columns (p, q).
    let e = phase.conj();
    let v_pp = C64::new(c, 0.0);
    let v_pq = C64::new(s, 0.0);
    let v_qp = -s * e;
    let v_qq = c * e;

    let n = a.rows();
    // Rows p, q of A <- V† A (A stays Hermitian, so columns follow by conjugation).
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        let new_p = v_pp.conj() * apk + v_qp.conj() * aqk;
        let new_q = v_pq.conj() * apk + v_qq.conj() * aqk;
        a[(p, k)] = new_p;
        a[(q, k)] = new_q;
        a[(k, p)] = new_p.conj();
        a[(k, q)] = new_q.conj();
    }
    a[(p, p)] = C64::new(app - t * g_abs, 0.0);
    a[(q, q)] = C64::new(aqq + t * g_abs, 0.0);
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;

    // Eigenvector rows: Vt <- V^T Vt.
    for k in 0..n {
        let wp = vt[(p, k)];
        let wq = vt[(q, k)];
        vt[(p, k)] = v_pp * wp + v_qp * wq;
        vt[(q, k)] = v_pq * wp + v_qq * wq;
    }
}
