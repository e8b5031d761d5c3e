use entlab_core::classdyn::{
    cylinder_weights_by_depth, ArcPartition, CoarseJacobian, PolygonWeigher, ToralAutomorphism,
    DEFAULT_CYLINDER_CAP,
};
use entlab_core::entropy::{classical_subadditivity_defect, SUBADDITIVITY_TOL};
use entlab_core::eup::{subadditivity_check, WeightScheme};
use entlab_core::qpartitions::Ordering;
use rayon::prelude::*;

use super::{mean, Experiment, Torus};
use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

/// Allowed excess of the largest-N mean defect over the fitted bound.
const DEFECT_MARGIN: f64 = 0.1;

pub struct Subadd;

impl Experiment for Subadd {
    fn name(&self) -> &'static str {
        "subadd"
    }

    fn about(&self) -> &'static str {
        "Quantum pressure subadditivity defects p_{n_o + n} - p_{n_o} - p_n, and exact classical subadditivity"
    }

    fn columns(&self) -> &'static str {
        "Config: n_o, depth = n (requires n_o + n <= n_E for every N), eigenstates per N, measures for the classical check.\n\
         Outputs:\n  subadd.csv: N, eigenstate, weights, defect   (weights = unit or jacobian)\n  \
         subadd_summary.csv: N, weights, mean, min, max\n  \
         subadd_classical.csv: measure, defect\n    \
         the fitted bound R is max |mean| over all but the largest N; the largest N must satisfy |mean| <= R + 0.1"
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let cat = ToralAutomorphism::cat();
        let arcs = ArcPartition::uniform(cfg.k)?;
        let jac = CoarseJacobian::with_default_r(&cat, &arcs);
        let schemes = [WeightScheme::Unit, WeightScheme::Jacobian(jac.clone())];
        let (n_o, n) = (cfg.n_o, cfg.depth);
        cfg.check_word_cap(n_o + n)?;
        let mut dims = cfg.n.clone();
        dims.sort_unstable();
        dims.dedup();
        let mut table = Table::new(&["N", "eigenstate", "weights", "defect"]);
        let mut summary = Table::new(&["N", "weights", "mean", "min", "max"]);
        let mut means: Vec<Vec<(usize, f64)>> = vec![Vec::new(); schemes.len()];
        for &dim in &dims {
            let torus = Torus::new(cfg, dim)?;
            if n_o + n > torus.n_e {
                return Err(ConfigError(format!(
                    "n_o + n = {} exceeds n_E = {} at N = {dim}",
                    n_o + n,
                    torus.n_e
                ))
                .into());
            }
            let states = torus.eigenstates(cfg.eigenstates, cfg.seed)?;
            for (s, scheme) in schemes.iter().enumerate() {
                let defects = states
                    .par_iter()
                    .map(|(_, psi)| {
                        subadditivity_check(
                            psi,
                            &torus.qp,
                            &torus.u,
                            n_o,
                            n,
                            torus.n_e,
                            scheme,
                            Ordering::Reversed,
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                for ((j, _), r) in states.iter().zip(&defects) {
                    table.push(row![dim, j, scheme.name(), fmt(*r)]);
                }
                let m = mean(&defects);
                let lo = defects.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = defects.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                summary.push(row![dim, scheme.name(), fmt(m), fmt(lo), fmt(hi)]);
                means[s].push((dim, m));
            }
        }
        let mut plot = LinePlot::new("Mean pressure subadditivity defect", "N", "mean defect");
        for (scheme, ms) in schemes.iter().zip(&means) {
            let (last, fit) = ms.split_last().expect("at least one N");
            let fitted = if fit.is_empty() {
                last.1.abs()
            } else {
                fit.iter().map(|m| m.1.abs()).fold(0.0, f64::max)
            };
            out.check(
                format!("bounded defect {}", scheme.name()),
                last.1.abs() <= fitted + DEFECT_MARGIN,
                format!(
                    "|mean R| at N={} is {:.4} (<= fitted {fitted:.4} + {DEFECT_MARGIN})",
                    last.0,
                    last.1.abs()
                ),
            );
            plot = plot.line(
                scheme.name(),
                ms.iter().map(|m| (m.0 as f64, m.1)).collect(),
            );
        }

        let weigher = PolygonWeigher::default();
        let mut classical = Table::new(&["measure", "defect"]);
        for m in &cfg.measures {
            let tables = cylinder_weights_by_depth(
                &m.measure,
                &cat,
                &arcs,
                n_o + n,
                &weigher,
                DEFAULT_CYLINDER_CAP,
            )?;
            let defect = classical_subadditivity_defect(&tables, &jac, n_o, n)?;
            classical.push(row![m.name, fmt(defect)]);
            out.check(
                format!("classical subadditivity {}", m.name),
                defect <= SUBADDITIVITY_TOL,
                format!(
                    "p_{} - p_{n_o} - p_{n} = {defect:.6e} (<= {SUBADDITIVITY_TOL:e})",
                    n_o + n
                ),
            );
        }
        out.csv("subadd", &table)?;
        out.csv("subadd_summary", &summary)?;
        out.csv("subadd_classical", &classical)?;
        out.plot("subadd", &plot)
    }
}
