use entlab_core::classdyn::{
    ruelle_bound, ArcPartition, PolygonWeigher, ToralAutomorphism, DEFAULT_CYLINDER_CAP,
};
use entlab_core::entropy::{ks_entropy_estimate, KsEstimate};
use rayon::prelude::*;

use super::{lyapunov, Experiment};
use crate::config::{Defaults, ExperimentConfig, MeasureSpec};
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

/// Tolerance on the estimate for measures with a Lebesgue component.
pub const KS_TOL: f64 = 0.1;
/// Tolerance for purely atomic measures, whose refined entropies are exact.
pub const ATOMIC_TOL: f64 = 1e-12;
pub const RUELLE_MARGIN: f64 = 0.05;

pub fn classical_defaults() -> Defaults {
    Defaults {
        k: 8,
        depth: 11,
        ..Defaults::default()
    }
}

/// KS entropy `mu(Leb) * Lambda`, exact for the linear cat map by affineness.
pub fn expected_ks(m: &MeasureSpec) -> (f64, f64) {
    let leb = m.measure.lebesgue_mass();
    (
        leb * lyapunov(),
        if leb > 0.0 { KS_TOL } else { ATOMIC_TOL },
    )
}

pub fn estimates(
    cfg: &ExperimentConfig,
    measures: &[MeasureSpec],
) -> Result<Vec<KsEstimate>, RunError> {
    let cat = ToralAutomorphism::cat();
    let p = ArcPartition::uniform(cfg.k)?;
    let weigher = PolygonWeigher::default();
    Ok(measures
        .par_iter()
        .map(|m| {
            ks_entropy_estimate(
                &m.measure,
                &cat,
                &p,
                cfg.depth,
                &weigher,
                DEFAULT_CYLINDER_CAP,
            )
        })
        .collect::<Result<Vec<_>, _>>()?)
}

pub struct ClassicalKs;

impl Experiment for ClassicalKs {
    fn name(&self) -> &'static str {
        "classical-ks"
    }

    fn about(&self) -> &'static str {
        "Kolmogorov-Sinai entropy of cat map invariant measures from refined arc partitions"
    }

    fn columns(&self) -> &'static str {
        "Config: K = number of equal arcs, depth = largest word length n_max, measures = [[measures]] tables.\n\
         Outputs:\n  classical_ks.csv: measure, n, h_n, difference   (difference = h_n - h_{n-1}, empty at n = 1)\n  \
         classical_ks_summary.csv: measure, lebesgue_mass, ks_estimate, expected, tolerance, inf_ratio, subadditive\n    \
         ks_estimate = h_{n_max} - h_{n_max - 1}; expected = lebesgue_mass * log lambda_+"
    }

    fn defaults(&self) -> Defaults {
        classical_defaults()
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let ests = estimates(cfg, &cfg.measures)?;
        let mut curve = Table::new(&["measure", "n", "h_n", "difference"]);
        let mut summary = Table::new(&[
            "measure",
            "lebesgue_mass",
            "ks_estimate",
            "expected",
            "tolerance",
            "inf_ratio",
            "subadditive",
        ]);
        let mut plot = LinePlot::new("Refined entropy increments", "n", "h_n - h_{n-1}");
        for (m, est) in cfg.measures.iter().zip(&ests) {
            for (i, h) in est.entropies.iter().enumerate() {
                let diff = if i == 0 {
                    String::new()
                } else {
                    fmt(est.differences[i - 1])
                };
                curve.push(row![m.name, i + 1, fmt(*h), diff]);
            }
            let (expected, tol) = expected_ks(m);
            summary.push(row![
                m.name,
                fmt(m.measure.lebesgue_mass()),
                fmt(est.difference_estimate),
                fmt(expected),
                fmt(tol),
                fmt(est.inf_ratio),
                est.subadditive
            ]);
            let err = (est.difference_estimate - expected).abs();
            out.check(
                format!("ks estimate {}", m.name),
                err <= tol,
                format!(
                    "h_{} - h_{} = {:.6} vs {expected:.6} (|error| = {err:.3e} <= {tol:e})",
                    cfg.depth,
                    cfg.depth - 1,
                    est.difference_estimate
                ),
            );
            out.check(
                format!("subadditivity {}", m.name),
                est.subadditive,
                "h_{n+m} <= h_n + h_m for all computed n, m",
            );
            plot = plot.line(
                m.name.clone(),
                est.differences
                    .iter()
                    .enumerate()
                    .map(|(i, d)| ((i + 2) as f64, *d))
                    .collect(),
            );
        }
        out.csv("classical_ks", &curve)?;
        out.csv("classical_ks_summary", &summary)?;
        out.plot("classical_ks", &plot)
    }
}

pub struct Ruelle;

impl Experiment for Ruelle {
    fn name(&self) -> &'static str {
        "ruelle"
    }

    fn about(&self) -> &'static str {
        "Ruelle inequality: KS entropy estimates against the integrated positive Lyapunov exponent"
    }

    fn columns(&self) -> &'static str {
        "Config: as classical-ks.\n\
         Outputs:\n  ruelle.csv: measure, ks_estimate, ruelle_bound, margin   (margin = ruelle_bound - ks_estimate)"
    }

    fn defaults(&self) -> Defaults {
        classical_defaults()
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let cat = ToralAutomorphism::cat();
        let ests = estimates(cfg, &cfg.measures)?;
        let mut table = Table::new(&["measure", "ks_estimate", "ruelle_bound", "margin"]);
        for (m, est) in cfg.measures.iter().zip(&ests) {
            let bound = ruelle_bound(&m.measure, &cat)?;
            let margin = bound - est.difference_estimate;
            table.push(row![
                m.name,
                fmt(est.difference_estimate),
                fmt(bound),
                fmt(margin)
            ]);
            out.check(
                format!("ruelle {}", m.name),
                margin >= -RUELLE_MARGIN,
                format!(
                    "ks estimate {:.6} <= bound {bound:.6} + {RUELLE_MARGIN}",
                    est.difference_estimate
                ),
            );
        }
        out.csv("ruelle", &table)
    }
}
