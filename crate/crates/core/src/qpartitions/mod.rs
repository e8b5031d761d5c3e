//! Smoothed partitions of unity on the position circle, their quantization,
//! and the refined operators built from them.

mod decay;
mod partition;
mod refined;
mod smooth;

use thiserror::Error;

use crate::quantization::QuantError;
use crate::symbols::SymbolError;

pub use decay::{
    ehrenfest_n1, ehrenfest_time, fit_decay_rate, max_norm_profile, max_operator_norm_profile,
    DEFAULT_EHRENFEST_DELTA,
};
pub use partition::{QuantumPartition, PARTITION_IDENTITY_TOL};
pub use refined::{
    forward_weights_by_depth, refined_operator, refined_weights, Ordering, RefinedWeights,
    DEFAULT_WEIGHT_CAP,
};
pub use smooth::SmoothPartition;

#[derive(Debug, Error)]
pub enum QPartError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("refined words must have at least one symbol")]
    EmptyWord,
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Quant(#[from] QuantError),
}

/// Builds a smoothed partition into `k` equal arcs.
pub fn build_smooth_partition(
    k: usize,
    epsilon: f64,
    width: f64,
) -> Result<SmoothPartition, QPartError> {
    SmoothPartition::new(k, epsilon, width)
}

/// Samples `sp` on the grid `j / N`.
pub fn quantize_partition(
    space: &crate::quantization::QuantumTorusSpace,
    sp: &SmoothPartition,
) -> QuantumPartition {
    QuantumPartition::from_smooth(space, sp)
}
