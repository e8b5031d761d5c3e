use entlab_core::classdyn::{ruelle_bound, InvariantMeasure, ToralAutomorphism};

use super::classical::{classical_defaults, estimates, expected_ks};
use super::{lyapunov, Experiment};
use crate::config::{Defaults, ExperimentConfig, MeasureSpec};
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

/// Lebesgue weights `t` of the mixtures `t Leb + (1 - t) delta_0`.
const LEBESGUE_WEIGHTS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const HALF_TOL: f64 = 0.1;

pub struct Saturation;

impl Experiment for Saturation {
    fn name(&self) -> &'static str {
        "saturation"
    }

    fn about(&self) -> &'static str {
        "Affine KS entropy along t Leb + (1 - t) delta_0; the half mixture reaches half the Ruelle bound"
    }

    fn columns(&self) -> &'static str {
        "Config: K and depth as classical-ks; the measures list is ignored.\n\
         Outputs:\n  saturation.csv: lebesgue_weight, ks_estimate, affine_prediction, ruelle_bound, half_ruelle_bound"
    }

    fn defaults(&self) -> Defaults {
        classical_defaults()
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let cat = ToralAutomorphism::cat();
        let measures: Vec<MeasureSpec> = LEBESGUE_WEIGHTS
            .iter()
            .map(|&t| {
                let mu = if t == 0.0 {
                    InvariantMeasure::origin()
                } else if t == 1.0 {
                    InvariantMeasure::Lebesgue
                } else {
                    InvariantMeasure::mixture(vec![
                        (t, InvariantMeasure::Lebesgue),
                        (1.0 - t, InvariantMeasure::origin()),
                    ])
                };
                MeasureSpec::new(format!("t={t}"), mu)
            })
            .collect();
        let ests = estimates(cfg, &measures)?;
        let mut table = Table::new(&[
            "lebesgue_weight",
            "ks_estimate",
            "affine_prediction",
            "ruelle_bound",
            "half_ruelle_bound",
        ]);
        let mut observed = Vec::new();
        for ((t, m), est) in LEBESGUE_WEIGHTS.iter().zip(&measures).zip(&ests) {
            let (expected, tol) = expected_ks(m);
            let bound = ruelle_bound(&m.measure, &cat)?;
            let h = est.difference_estimate;
            table.push(row![
                fmt(*t),
                fmt(h),
                fmt(expected),
                fmt(bound),
                fmt(bound / 2.0)
            ]);
            observed.push((*t, h));
            out.check(
                format!("affine {}", m.name),
                (h - expected).abs() <= tol,
                format!("ks estimate {h:.6} vs t Lambda = {expected:.6} (tolerance {tol:e})"),
            );
            if *t == 0.5 {
                out.check(
                    "half mixture saturates",
                    (h - bound / 2.0).abs() <= HALF_TOL,
                    format!(
                        "ks estimate {h:.6} vs half Ruelle bound {:.6} (tolerance {HALF_TOL})",
                        bound / 2.0
                    ),
                );
            }
        }
        out.csv("saturation", &table)?;
        let lambda = lyapunov();
        let plot = LinePlot::new("KS entropy of t Leb + (1 - t) delta_0", "t", "entropy")
            .line("ks estimate", observed)
            .dashed("t Lambda", vec![(0.0, 0.0), (1.0, lambda)])
            .dashed("Lambda / 2", vec![(0.0, lambda / 2.0), (1.0, lambda / 2.0)]);
        out.plot("saturation", &plot)
    }
}
