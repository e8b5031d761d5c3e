use super::propagator::Propagator;
use super::space::{QuantumState, QuantumTorusSpace};
use super::weyl::{apply_observable, Observable};
use crate::numkernel::{dot, operator_norm, ComplexMatrix, C64};

/// Relative tolerance of the power iteration behind [`egorov_defect`].
pub const EGOROV_NORM_TOL: f64 = 1e-3;

/// `Op(a) U^t - U^t Op(a o A^t)`, which has the same norm as
/// `U^{-t} Op(a) U^t - Op(a o A^t)`. Built from monomial products in `O(N^2)`
/// per Fourier mode once `U^t` is known.
pub fn egorov_commutator(
    space: &QuantumTorusSpace,
    ut: &ComplexMatrix,
    a: &Observable,
    evolved: &Observable,
) -> ComplexMatrix {
    let n = space.dim();
    let mut diff = ComplexMatrix::zeros(n, n);
    for (c, t) in a.translations(space) {
        t.add_left_product(c, ut, &mut diff);
    }
    for (c, t) in evolved.translations(space) {
        t.add_right_product(-c, ut, &mut diff);
    }
    diff
}

/// Operator-norm defect `|U^{-t} Op(a) U^t - Op(a o A^t)|`.
pub fn egorov_defect(u: &Propagator, a: &Observable, t: i64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    let ut = u.power(t);
    let diff = egorov_commutator(u.space(), &ut, a, &a.compose(u.map(), t));
    operator_norm(&diff, EGOROV_NORM_TOL)
}

/// Frobenius norm of the same defect, an upper bound on the operator norm.
pub fn egorov_defect_bound(u: &Propagator, ut: &ComplexMatrix, a: &Observable, t: i64) -> f64 {
    egorov_commutator(u.space(), ut, a, &a.compose(u.map(), t)).frobenius_norm()
}

/// `<Op(a) psi, psi>`.
pub fn wigner_element(space: &QuantumTorusSpace, psi: &QuantumState, a: &Observable) -> C64 {
    let opa = apply_observable(space, a, psi.amplitudes());
    dot(psi.amplitudes(), &opa)
}
