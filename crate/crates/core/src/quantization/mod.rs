//! Quantization of the torus: Hilbert space of dimension `N`, Weyl
//! translations, quantized observables and the propagator of a toral
//! automorphism.

mod egorov;
mod propagator;
mod space;
mod weyl;

pub use egorov::{
    egorov_commutator, egorov_defect, egorov_defect_bound, wigner_element, EGOROV_NORM_TOL,
};
pub use propagator::{cat_propagator, Propagator, PROPAGATOR_UNITARITY_TOL};
pub use space::{QuantumState, QuantumTorusSpace, STATE_NORM_TOL};
pub use weyl::{
    apply_observable, quantize_observable, weyl_translation, Observable, WeylTranslation,
};

use thiserror::Error;

use crate::numkernel::NumError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantError {
    #[error("dimension N = {n} must be even and at least 2")]
    OddDimension { n: usize },
    #[error("the automorphism has b = 0 and no propagator of this form")]
    ZeroOffDiagonal,
    #[error("propagator is not unitary (max |U†U - I| = {defect:.3e})")]
    NotUnitary { defect: f64 },
    #[error("state norm {norm} differs from 1")]
    NotNormalized { norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Num(#[from] NumError),
}
