//! Classical dynamics of hyperbolic toral automorphisms: the map, arc
//! partitions of the position circle, invariant measures, cylinder weights,
//! coarse-grained unstable Jacobians and periodic orbits.

mod automorphism;
mod cylinder;
mod jacobian;
mod measure;
mod partition;
mod periodic;

pub use automorphism::{apply_map, wrap_unit, RationalPoint, ToralAutomorphism, TorusPoint};
pub use cylinder::{
    cylinder_weight, cylinder_weights, cylinder_weights_by_depth, lebesgue_weigher,
    weigher_registry, GridWeigher, LebesgueWeigher, PolygonWeigher, WeigherFactory,
    DEFAULT_CYLINDER_CAP,
};
pub use jacobian::{coarse_ruelle_bound, ruelle_bound, CoarseJacobian, DEFAULT_R_FACTOR};
pub use measure::{InvariantMeasure, MixtureComponent};
pub use partition::ArcPartition;
pub use periodic::{find_periodic_orbit, orbit_of, periodic_orbits, MAX_DENOMINATOR};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("matrix determinant is {det}, expected 1")]
    NotUnimodular { det: i64 },
    #[error("trace {trace} does not give a hyperbolic map (|trace| must exceed 2)")]
    NotHyperbolic { trace: i64 },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("cylinder table exceeds the cap of {cap} entries")]
    CapExceeded { cap: u64 },
    #[error("{0}")]
    InvalidArgument(String),
}
