//! The weighted entropic uncertainty inequality: generic instances, the
//! contraction coefficient, its instantiation with refined quantum partitions
//! and Jacobian weights, and the subadditivity defect of refined pressures.

mod corollary;
mod instance;

use thiserror::Error;

use crate::entropy::EntropyError;
use crate::qpartitions::QPartError;
use crate::symbols::SymbolError;

pub use corollary::{
    corollary_instance, jacobian_weights, refined_contraction, refined_pressure,
    subadditivity_check, CorollaryReport, WeightScheme, COROLLARY_WORD_CAP, EXHAUSTIVE_PAIR_CAP,
    SAMPLED_PAIRS,
};
pub use instance::{
    basis_eup_report, basis_projectors, check_eup, contraction_coefficient, eup_rhs,
    localization_defect, random_partition_of_unity, span_projector, EupInstance, EupReport,
    INSTANCE_TOL, SLACK_TOL,
};

#[derive(Debug, Error)]
pub enum EupError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    QPart(#[from] QPartError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}
