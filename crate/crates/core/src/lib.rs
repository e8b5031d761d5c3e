/// Version of this library, echoed in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod classdyn;
pub mod entropy;
pub mod eup;
pub mod numkernel;
pub mod qpartitions;
pub mod quantization;
pub mod symbols;
