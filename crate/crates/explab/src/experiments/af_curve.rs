use entlab_core::entropy::{af_entropy_curve, StateRef};
use rayon::prelude::*;

use super::{slope, Experiment, Torus};
use crate::config::{Defaults, ExperimentConfig};
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

/// The curve is followed up to `n_E + EXTRA_STEPS`.
const EXTRA_STEPS: usize = 3;

pub struct AfCurve;

impl Experiment for AfCurve {
    fn name(&self) -> &'static str {
        "af-curve"
    }

    fn about(&self) -> &'static str {
        "Von Neumann entropy tr eta(rho_n) of the refined density matrices of eigenstates, saturating after the Ehrenfest time"
    }

    fn columns(&self) -> &'static str {
        "Config: eigenstates = eigenstates per N.\n\
         Outputs:\n  af_curve.csv: N, eigenstate, n, af_entropy   (n = 1..n_E + 3)\n  \
         af_curve_summary.csv: N, n_e, early_slope, late_slope\n    \
         slopes are least-squares fits of the eigenstate-mean curve over [1, n_E - 1] and [n_E + 1, n_E + 3]"
    }

    fn defaults(&self) -> Defaults {
        Defaults {
            n: vec![64, 128],
            eigenstates: 5,
            ..Defaults::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let mut table = Table::new(&["N", "eigenstate", "n", "af_entropy"]);
        let mut summary = Table::new(&["N", "n_e", "early_slope", "late_slope"]);
        let mut plot = LinePlot::new(
            "Refined von Neumann entropy (eigenstate mean)",
            "n",
            "entropy",
        );
        for &n in &cfg.n {
            let torus = Torus::new(cfg, n)?;
            if torus.n_e < 3 {
                return Err(RunError::Config(crate::config::ConfigError(format!(
                    "N = {n} has n_E = {} but the early slope needs n_E >= 3",
                    torus.n_e
                ))));
            }
            let n_max = torus.n_e + EXTRA_STEPS;
            let states = torus.eigenstates(cfg.eigenstates, cfg.seed)?;
            let curves = states
                .par_iter()
                .map(|(_, psi)| af_entropy_curve(StateRef::Pure(psi), &torus.qp, &torus.u, n_max))
                .collect::<Result<Vec<_>, _>>()?;
            let mut avg = vec![0.0; n_max];
            for ((j, _), curve) in states.iter().zip(&curves) {
                for (d, h) in curve.iter().enumerate() {
                    table.push(row![n, j, d + 1, fmt(*h)]);
                    avg[d] += h / curves.len() as f64;
                }
            }
            let points: Vec<(f64, f64)> = avg
                .iter()
                .enumerate()
                .map(|(d, h)| ((d + 1) as f64, *h))
                .collect();
            let early = slope(&points[..torus.n_e - 1]);
            let late = slope(&points[torus.n_e..]);
            summary.push(row![n, torus.n_e, fmt(early), fmt(late)]);
            out.check(
                format!("saturation N={n}"),
                early > late,
                format!(
                    "slope over [1, {}] = {early:.4} > slope over [{}, {n_max}] = {late:.4}",
                    torus.n_e - 1,
                    torus.n_e + 1
                ),
            );
            plot = plot.line(format!("N={n}"), points);
        }
        out.csv("af_curve", &table)?;
        out.csv("af_curve_summary", &summary)?;
        out.plot("af_curve", &plot)
    }
}
