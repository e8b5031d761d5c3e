use super::functionals::shannon_entropy;
use super::EntropyError;
use crate::numkernel::{hermitian_eig, spectrum_entropy, ComplexMatrix, C64};
use crate::qpartitions::{refined_weights, Ordering, QuantumPartition, RefinedWeights};
use crate::quantization::Propagator;
use crate::symbols::{check_cap, PressureWeights, WeightVector};

/// Default cap on the side of an explicit AF density matrix.
pub const AF_MATRIX_CAP: u64 = 4096;
/// Largest purified dimension used for mixed-state AF curves.
pub const AF_PURIFIED_CAP: usize = 512;
/// Density-matrix eigenvalues below this are rejected as negative.
const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;

/// A pure state vector or a density matrix.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a [C64]),
    Mixed(&'a ComplexMatrix),
}

/// `sum_a eta(|P_a psi|^2)` (forward) or with `P*_a` (reversed).
pub fn quantum_entropy(
    psi: &[C64],
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    ordering: Ordering,
    cap: u64,
) -> Result<f64, EntropyError> {
    Ok(shannon_entropy(
        &refined_weights(psi, qp, u, n, ordering, cap)?.weights,
    ))
}

/// Pressure of the refined weights of `psi` with weights `v`.
pub fn quantum_pressure(
    psi: &[C64],
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    ordering: Ordering,
    v: &PressureWeights,
    cap: u64,
) -> Result<f64, EntropyError> {
    let w = refined_weights(psi, qp, u, n, ordering, cap)?;
    super::pressure(&w.weights, v)
}

/// Columns `sqrt(p_i) r_i` with `rho = sum_i p_i r_i r_i^*`, dropping null directions.
fn purification(state: StateRef<'_>, dim: usize) -> Result<Vec<Vec<C64>>, EntropyError> {
    match state {
        StateRef::Pure(psi) => {
            if psi.len() != dim {
                return Err(EntropyError::Dimension {
                    expected: dim,
                    found: psi.len(),
                });
            }
            Ok(vec![psi.to_vec()])
        }
        StateRef::Mixed(rho) => {
            if rho.rows() != dim {
                return Err(EntropyError::Dimension {
                    expected: dim,
                    found: rho.rows(),
                });
            }
            let trace = rho.trace();
            if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
                return Err(EntropyError::InvalidArgument(format!(
                    "density matrix trace {trace}"
                )));
            }
            let eig = hermitian_eig(rho)?;
            let mut columns = Vec::new();
            for (j, p) in eig.real_eigenvalues().into_iter().enumerate() {
                if p < -NEGATIVE_EIGENVALUE_TOL {
                    return Err(EntropyError::InvalidArgument(format!(
                        "negative density eigenvalue {p:.3e}"
                    )));
                }
                if p > 0.0 {
                    let s = p.sqrt();
                    columns.push(eig.eigenvector(j).into_iter().map(|z| z * s).collect());
                }
            }
            Ok(columns)
        }
    }
}

/// `tr(P_a rho P_a^*)` for all words of length `n`.
pub fn sz_instrument_weights(
    state: StateRef<'_>,
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    cap: u64,
) -> Result<WeightVector, EntropyError> {
    let columns = purification(state, u.dim())?;
    let mut total: Option<WeightVector> = None;
    for r in &columns {
        // Refined weights are quadratic in the vector, so scaled columns add up directly.
        let RefinedWeights { weights, .. } = refined_weights(r, qp, u, n, Ordering::Forward, cap)?;
        total = Some(match total {
            None => weights,
            Some(t) => t.combine(1.0, &weights, 1.0)?,
        });
    }
    total.ok_or_else(|| EntropyError::InvalidArgument("zero density matrix".into()))
}

/// Vectors `X_a r` for every word, `X_a = P_{a_{n-1}} U ... U P_{a_0}`, in code order.
fn leaf_vectors(r: &[C64], qp: &QuantumPartition, u: &Propagator, n: usize) -> Vec<Vec<C64>> {
    let mut level: Vec<Vec<C64>> = (0..qp.len()).map(|s| qp.apply(s, r)).collect();
    for _ in 1..n {
        level = level
            .iter()
            .flat_map(|phi| {
                let evolved = u.apply(phi);
                (0..qp.len())
                    .map(move |s| qp.apply(s, &evolved))
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    level
}

/// `[rho_n]_{a', a} = tr(P_{a'} rho P_a^*)` over words of length `n`.
pub fn af_density_matrix(
    state: StateRef<'_>,
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    cap: u64,
) -> Result<ComplexMatrix, EntropyError> {
    if n == 0 {
        return Err(EntropyError::InvalidArgument(
            "depth must be at least 1".into(),
        ));
    }
    let size = check_cap(qp.len(), n, cap)? as usize;
    let columns = purification(state, u.dim())?;
    let mut rho_n = ComplexMatrix::zeros(size, size);
    for r in &columns {
        let leaves = leaf_vectors(r, qp, u, n);
        for (ap, vp) in leaves.iter().enumerate() {
            for (a, v) in leaves.iter().enumerate() {
                let z: C64 = v.iter().zip(vp).map(|(x, y)| x.conj() * y).sum();
                rho_n[(ap, a)] += z;
            }
        }
    }
    Ok(rho_n)
}

/// `h^AF_n = tr eta(rho_n)` for `n = 1..=n_max`.
///
/// The nonzero spectrum of `rho_n` is that of `sigma_n = sum_a X_a rho X_a^*`,
/// which obeys `sigma_{n+1} = sum_k P_k U sigma_n U^* P_k`; for a mixed state the
/// same recursion runs on a purification, blockwise.
pub fn af_entropy_curve(
    state: StateRef<'_>,
    qp: &QuantumPartition,
    u: &Propagator,
    n_max: usize,
) -> Result<Vec<f64>, EntropyError> {
    let dim = u.dim();
    let columns = purification(state, dim)?;
    let r = columns.len();
    if dim * r > AF_PURIFIED_CAP.max(dim) {
        return Err(EntropyError::InvalidArgument(format!(
            "purified dimension {} exceeds {AF_PURIFIED_CAP}",
            dim * r
        )));
    }
    let big = dim * r;
    // sigma_1 = sum_k (P_k (x) I) |R><R| (P_k (x) I), with R the stacked columns.
    let stacked: Vec<C64> = columns.iter().flatten().copied().collect();
    let mut sigma = ComplexMatrix::zeros(big, big);
    for k in 0..qp.len() {
        let v = block_apply(qp.diagonal(k), &stacked, dim);
        add_outer(&mut sigma, &v);
    }
    let umat = u.matrix();
    let uadj = umat.adjoint();
    let mut curve = Vec::with_capacity(n_max);
    for step in 0..n_max {
        if step > 0 {
            sigma = evolve(&sigma, qp, umat, &uadj, dim, r);
        }
        let eig = hermitian_eig(&sigma)?;
        curve.push(spectrum_entropy(&eig.real_eigenvalues())?);
    }
    Ok(curve)
}

fn block_apply(diag: &[f64], v: &[C64], dim: usize) -> Vec<C64> {
    v.iter()
        .enumerate()
        .map(|(i, z)| z * diag[i % dim])
        .collect()
}

fn add_outer(m: &mut ComplexMatrix, v: &[C64]) {
    let n = v.len();
    for i in 0..n {
        if v[i] == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..n {
            m[(i, j)] += v[i] * v[j].conj();
        }
    }
}

/// Applies `S -> sum_k P_k U S U^* P_k` to every `dim x dim` block.
fn evolve(
    sigma: &ComplexMatrix,
    qp: &QuantumPartition,
    umat: &ComplexMatrix,
    uadj: &ComplexMatrix,
    dim: usize,
    r: usize,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim * r, dim * r);
    let weights: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    (0..qp.len())
                        .map(|k| qp.diagonal(k)[i] * qp.diagonal(k)[j])
                        .sum()
                })
                .collect()
        })
        .collect();
    for bi in 0..r {
        for bj in 0..r {
            let block =
                ComplexMatrix::from_fn(dim, dim, |i, j| sigma[(bi * dim + i, bj * dim + j)]);
            let conj = umat.matmul(&block).matmul(uadj);
            for i in 0..dim {
                for j in 0..dim {
                    out[(bi * dim + i, bj * dim + j)] = conj[(i, j)] * weights[i][j];
                }
            }
        }
    }
    out
}
