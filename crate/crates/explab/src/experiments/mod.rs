use entlab_core::classdyn::ToralAutomorphism;
use entlab_core::numkernel::C64;
use entlab_core::qpartitions::{
    build_smooth_partition, ehrenfest_time, quantize_partition, QuantumPartition,
};
use entlab_core::quantization::{Propagator, QuantumTorusSpace};

use crate::config::{Defaults, ExperimentConfig};
use crate::output::RunOutput;
use crate::RunError;

mod af_curve;
mod classical;
mod egorov;
mod entropy_sweep;
mod eup_fuzz;
mod maassen_uffink;
mod norm_decay;
mod qe_sweep;
mod saturation;
mod subadd;

/// One subcommand of the lab.
pub trait Experiment: Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Emitted files and their CSV columns, shown in `--help`.
    fn columns(&self) -> &'static str;
    fn defaults(&self) -> Defaults {
        Defaults::default()
    }
    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError>;
}

pub fn registry() -> Vec<Box<dyn Experiment>> {
    vec![
        Box::new(egorov::Egorov),
        Box::new(eup_fuzz::EupFuzz),
        Box::new(maassen_uffink::MaassenUffink),
        Box::new(norm_decay::NormDecay),
        Box::new(entropy_sweep::EntropySweep),
        Box::new(classical::ClassicalKs),
        Box::new(classical::Ruelle),
        Box::new(saturation::Saturation),
        Box::new(af_curve::AfCurve),
        Box::new(subadd::Subadd),
        Box::new(qe_sweep::QeSweep),
    ]
}

/// `log lambda_+` of the cat map.
pub fn lyapunov() -> f64 {
    ToralAutomorphism::cat().log_lambda()
}

/// Quantized cat map at one `N` with the configured smooth partition.
pub struct Torus {
    pub n: usize,
    pub space: QuantumTorusSpace,
    pub u: Propagator,
    pub qp: QuantumPartition,
    pub n_e: usize,
}

impl Torus {
    pub fn new(cfg: &ExperimentConfig, n: usize) -> Result<Self, RunError> {
        let cat = ToralAutomorphism::cat();
        let space = QuantumTorusSpace::new(n)?;
        let u = Propagator::new(&space, &cat)?;
        let sp = build_smooth_partition(cfg.k, cfg.epsilon, cfg.width)?;
        let qp = quantize_partition(&space, &sp);
        let n_e = cfg
            .n_e
            .unwrap_or_else(|| ehrenfest_time(&space, &cat, cfg.delta_prime));
        Ok(Self {
            n,
            space,
            u,
            qp,
            n_e,
        })
    }

    /// `min(count, N)` eigenstates at evenly spaced positions in eigenphase order.
    pub fn eigenstates(&self, count: usize, seed: u64) -> Result<Vec<(usize, Vec<C64>)>, RunError> {
        let eig = self.u.eigenstates(seed)?;
        Ok(spread(count, self.n)
            .into_iter()
            .map(|j| (j, eig.eigenvector(j)))
            .collect())
    }
}

pub fn spread(count: usize, n: usize) -> Vec<usize> {
    let m = count.min(n);
    (0..m).map(|i| i * n / m).collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
