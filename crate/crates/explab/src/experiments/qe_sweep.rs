use entlab_core::numkernel::C64;
use entlab_core::quantization::{quantize_observable, wigner_element, Observable, QuantumState};
use rayon::prelude::*;

use super::{mean, Experiment, Torus};
use crate::config::ExperimentConfig;
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

const MODES: [(i64, i64); 8] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (1, -1),
    (2, 0),
    (0, 2),
    (2, 1),
    (1, 2),
];
const TRACE_TOL: f64 = 1e-10;

pub struct QeSweep;

impl Experiment for QeSweep {
    fn name(&self) -> &'static str {
        "qe-sweep"
    }

    fn about(&self) -> &'static str {
        "Quantum ergodicity: eigenstate variance of Wigner elements <Op(a) psi_j, psi_j> for Fourier modes a = e_(p,q)"
    }

    fn columns(&self) -> &'static str {
        "Config: N list; every eigenstate is used.\n\
         Outputs:\n  qe_sweep.csv: N, p, q, mean_re, mean_im, trace_over_n_abs, variance\n    \
         mean = (1/N) sum_j <Op(a) psi_j, psi_j>, which must equal tr Op(a) / N; variance = (1/N) sum_j |<Op(a) psi_j, psi_j>|^2"
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let mut table = Table::new(&[
            "N",
            "p",
            "q",
            "mean_re",
            "mean_im",
            "trace_over_n_abs",
            "variance",
        ]);
        let mut dims = cfg.n.clone();
        dims.sort_unstable();
        dims.dedup();
        let mut mode_variance: Vec<Vec<(f64, f64)>> = vec![Vec::new(); MODES.len()];
        for &n in &dims {
            let torus = Torus::new(cfg, n)?;
            let eig = torus.u.eigenstates(cfg.seed)?;
            let states: Vec<QuantumState> = (0..n)
                .map(|j| QuantumState::new(eig.eigenvector(j)))
                .collect::<Result<_, _>>()?;
            let mut worst_trace = 0.0f64;
            for (m, &(p, q)) in MODES.iter().enumerate() {
                let a = Observable::fourier_mode(p, q);
                let elements: Vec<C64> = states
                    .par_iter()
                    .map(|s| wigner_element(&torus.space, s, &a))
                    .collect();
                let avg = elements.iter().sum::<C64>() / n as f64;
                let trace = quantize_observable(&torus.space, &a).trace() / n as f64;
                let variance = elements.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
                worst_trace = worst_trace.max((avg - trace).norm());
                table.push(row![
                    n,
                    p,
                    q,
                    fmt(avg.re),
                    fmt(avg.im),
                    fmt(trace.norm()),
                    fmt(variance)
                ]);
                mode_variance[m].push((n as f64, variance));
            }
            out.check(
                format!("trace identity N={n}"),
                worst_trace <= TRACE_TOL,
                format!("max |mean_j <Op(a) psi_j, psi_j> - tr Op(a) / N| = {worst_trace:.3e} (<= {TRACE_TOL:e})"),
            );
        }
        if dims.len() > 1 {
            let first: Vec<f64> = mode_variance.iter().map(|v| v[0].1).collect();
            let last: Vec<f64> = mode_variance.iter().map(|v| v[v.len() - 1].1).collect();
            let (a, b) = (mean(&first), mean(&last));
            out.check(
                "variance decreases",
                b < a,
                format!(
                    "mode-averaged variance {b:.4e} at N={} < {a:.4e} at N={}",
                    dims[dims.len() - 1],
                    dims[0]
                ),
            );
        }
        out.csv("qe_sweep", &table)?;
        let plot = MODES.iter().zip(&mode_variance).fold(
            LinePlot::new(
                "Eigenstate variance of Wigner elements",
                "log2 N",
                "log10 variance",
            ),
            |plot, (&(p, q), v)| {
                plot.line(
                    format!("({p},{q})"),
                    v.iter()
                        .map(|&(n, var)| (n.log2(), var.max(1e-300).log10()))
                        .collect(),
                )
            },
        );
        out.plot("qe_sweep", &plot)
    }
}
