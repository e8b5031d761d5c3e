use entlab_core::classdyn::{InvariantMeasure, ToralAutomorphism};
use entlab_core::entropy::{shannon_entropy, smoothed_cylinder_weights};
use entlab_core::qpartitions::{
    build_smooth_partition, forward_weights_by_depth, DEFAULT_WEIGHT_CAP,
};
use rayon::prelude::*;

use super::{Experiment, Torus};
use crate::config::ExperimentConfig;
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

const TOTAL_TOL: f64 = 1e-9;
/// Side of the midpoint grid for the classical smoothed weights.
const GRID_SIDE: usize = 256;

pub struct EntropySweep;

impl Experiment for EntropySweep {
    fn name(&self) -> &'static str {
        "entropy-sweep"
    }

    fn about(&self) -> &'static str {
        "Refined quantum entropies h_n of eigenstates up to the Ehrenfest time, beside the classical smoothed Lebesgue entropies"
    }

    fn columns(&self) -> &'static str {
        "Config: eigenstates = eigenstates per N.\n\
         Outputs:\n  entropy_sweep.csv: N, n, quantum_mean, quantum_min, quantum_max, classical, classical_minus_quantum\n    \
         quantum_* over eigenstates of sum_a eta(|P_a psi|^2); classical = sum_a eta(int prod_j f_{a_j}^2 o A^j dx)"
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let cat = ToralAutomorphism::cat();
        let sp = build_smooth_partition(cfg.k, cfg.epsilon, cfg.width)?;
        let mut table = Table::new(&[
            "N",
            "n",
            "quantum_mean",
            "quantum_min",
            "quantum_max",
            "classical",
            "classical_minus_quantum",
        ]);
        let mut plot = LinePlot::new("Refined entropies", "n", "h_n");
        let mut classical: Vec<f64> = Vec::new();
        let log_k = (cfg.k as f64).ln();
        for &n in &cfg.n {
            let torus = Torus::new(cfg, n)?;
            cfg.check_word_cap(torus.n_e)?;
            while classical.len() < torus.n_e {
                let d = classical.len() + 1;
                let w = smoothed_cylinder_weights(
                    &InvariantMeasure::Lebesgue,
                    &cat,
                    &sp,
                    d,
                    GRID_SIDE,
                    DEFAULT_WEIGHT_CAP,
                )?;
                let total: f64 = w.iter().map(|(_, x)| x).sum();
                out.check(
                    format!("classical total n={d}"),
                    (total - 1.0).abs() <= TOTAL_TOL,
                    format!("sum of smoothed Lebesgue weights = {total:.15}"),
                );
                classical.push(shannon_entropy(&w));
            }
            let states = torus.eigenstates(cfg.eigenstates, cfg.seed)?;
            let tables = states
                .par_iter()
                .map(|(_, psi)| {
                    forward_weights_by_depth(
                        psi,
                        &torus.qp,
                        &torus.u,
                        torus.n_e,
                        DEFAULT_WEIGHT_CAP,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut worst_total = 0.0f64;
            let mut bound_ok = true;
            let mut series = Vec::new();
            for d in 1..=torus.n_e {
                let hs: Vec<f64> = tables
                    .iter()
                    .map(|t| {
                        worst_total = worst_total.max((t[d - 1].total() - 1.0).abs());
                        shannon_entropy(&t[d - 1].weights)
                    })
                    .collect();
                bound_ok &= hs.iter().all(|&h| h <= d as f64 * log_k + 1e-12);
                let mean = hs.iter().sum::<f64>() / hs.len() as f64;
                let min = hs.iter().copied().fold(f64::INFINITY, f64::min);
                let max = hs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let c = classical[d - 1];
                table.push(row![
                    n,
                    d,
                    fmt(mean),
                    fmt(min),
                    fmt(max),
                    fmt(c),
                    fmt(c - mean)
                ]);
                series.push((d as f64, mean));
            }
            out.check(
                format!("partition of unity N={n}"),
                worst_total <= TOTAL_TOL,
                format!("max |sum_a |P_a psi|^2 - 1| for n <= {} = {worst_total:.3e} (<= {TOTAL_TOL:e})", torus.n_e),
            );
            out.check(
                format!("entropy bound N={n}"),
                bound_ok,
                format!("h_n <= n log K for every eigenstate and n <= {}", torus.n_e),
            );
            plot = plot.line(format!("quantum N={n}"), series);
        }
        let classical_series = classical
            .iter()
            .enumerate()
            .map(|(d, h)| ((d + 1) as f64, *h))
            .collect();
        out.csv("entropy_sweep", &table)?;
        out.plot(
            "entropy_sweep",
            &plot.dashed("classical (Lebesgue)", classical_series),
        )
    }
}
