//! Entropy and pressure functionals: Shannon entropy of weight tables,
//! classical refined entropies and their KS estimates, quantum refined
//! entropies, pressures, instrument weights and Alicki-Fannes entropies.

mod classical;
mod functionals;
mod quantum;

use thiserror::Error;

use crate::classdyn::ClassError;
use crate::numkernel::NumError;
use crate::qpartitions::QPartError;
use crate::symbols::SymbolError;

pub use classical::{
    classical_pressure, classical_refined_entropy, classical_subadditivity_defect,
    ks_entropy_estimate, smoothed_cylinder_weights, KsEstimate, SUBADDITIVITY_TOL,
};
pub use functionals::{eta, pressure, shannon_entropy, shannon_entropy_of};
pub use quantum::{
    af_density_matrix, af_entropy_curve, quantum_entropy, quantum_pressure, sz_instrument_weights,
    StateRef, AF_MATRIX_CAP, AF_PURIFIED_CAP,
};

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("weight {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("{k}^{n} words exceed the cap of {cap}")]
    CapExceeded { k: usize, n: usize, cap: u64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    QPart(#[from] QPartError),
    #[error(transparent)]
    Num(#[from] NumError),
}
