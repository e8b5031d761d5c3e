use entlab_core::eup::{
    check_eup, localization_defect, random_partition_of_unity, span_projector, EupInstance,
    EupReport, SLACK_TOL,
};
use entlab_core::numkernel::random::{random_state, random_unitary};
use entlab_core::numkernel::{normalized, ComplexMatrix, C64};
use entlab_core::symbols::PressureWeights;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Experiment;
use crate::config::{Defaults, ExperimentConfig};
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

const MIN_DIM: usize = 2;
const MAX_DIM: usize = 64;
const MAX_LOCALIZED_DIM: usize = 32;
const MAX_FAMILY: usize = 4;
const WEIGHT_RANGE: (f64, f64) = (1.0, 10.0);
/// Floor on epsilon for localized instances, so that it is strictly positive.
const MIN_EPSILON: f64 = 1e-3;

pub struct EupFuzz;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Plain,
    Localized,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Plain => "plain",
            Kind::Localized => "localized",
        }
    }
}

/// Instance `index` of the given kind, drawn from its own random stream.
fn instance(seed: u64, kind: Kind, index: usize) -> Result<(EupReport, usize), RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * index as u64 + u64::from(kind == Kind::Localized));
    let max_dim = if kind == Kind::Plain {
        MAX_DIM
    } else {
        MAX_LOCALIZED_DIM
    };
    let d = rng.random_range(MIN_DIM..=max_dim);
    let np = rng.random_range(2..=MAX_FAMILY);
    let nt = rng.random_range(2..=MAX_FAMILY);
    let pi = random_partition_of_unity(d, np, &mut rng);
    let tau = random_partition_of_unity(d, nt, &mut rng);
    let u = random_unitary(d, &mut rng);
    let psi = normalized(&random_state(d, &mut rng));
    let v = PressureWeights::from_fn(np, 1, |_| rng.random_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1));
    let w = PressureWeights::from_fn(nt, 1, |_| rng.random_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1));
    let (o, eps) = match kind {
        Kind::Plain => (ComplexMatrix::identity(d), 0.0),
        Kind::Localized => {
            // Projector on a random subspace; every other instance it also contains all pi_k psi.
            let mut spanning: Vec<Vec<C64>> = Vec::new();
            if index.is_multiple_of(2) {
                spanning.extend(pi.iter().map(|p| p.matvec(&psi)));
            }
            for _ in 0..rng.random_range(1..=d) {
                spanning.push(random_state(d, &mut rng));
            }
            let o = span_projector(&spanning, d)?;
            let eps = localization_defect(&psi, &pi, &o).max(MIN_EPSILON);
            (o, eps)
        }
    };
    let inst = EupInstance::new(pi, tau, u, o, v, w, eps)?;
    Ok((check_eup(&inst, &psi)?, d))
}

impl Experiment for EupFuzz {
    fn name(&self) -> &'static str {
        "eup-fuzz"
    }

    fn about(&self) -> &'static str {
        "Weighted entropic uncertainty principle on random finite-dimensional instances"
    }

    fn columns(&self) -> &'static str {
        "Config: samples = number of instances with O = Id and epsilon = 0; samples / 10 more use a projector O and epsilon > 0.\n\
         Outputs:\n  eup_fuzz.csv: instance, kind, dim, pi_len, tau_len, epsilon, localization_defect, pressure_pi, pressure_tau_of_upsi, c, rhs, slack\n  \
         eup_reports.json: every EupReport (schema in docs/eup_report.schema.json)"
    }

    fn defaults(&self) -> Defaults {
        Defaults {
            samples: 1000,
            ..Defaults::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let jobs: Vec<(Kind, usize)> = (0..cfg.samples)
            .map(|i| (Kind::Plain, i))
            .chain((0..(cfg.samples / 10).max(1)).map(|i| (Kind::Localized, i)))
            .collect();
        let results: Vec<(EupReport, usize)> = jobs
            .par_iter()
            .map(|&(kind, i)| instance(cfg.seed, kind, i))
            .collect::<Result<_, _>>()?;
        let mut table = Table::new(&[
            "instance",
            "kind",
            "dim",
            "pi_len",
            "tau_len",
            "epsilon",
            "localization_defect",
            "pressure_pi",
            "pressure_tau_of_upsi",
            "c",
            "rhs",
            "slack",
        ]);
        let mut plot = LinePlot::new("Uncertainty slack (sorted)", "instance rank", "slack");
        for kind in [Kind::Plain, Kind::Localized] {
            let mut slacks = Vec::new();
            let mut hypotheses = true;
            for ((k, i), (r, d)) in jobs.iter().zip(&results) {
                if *k != kind {
                    continue;
                }
                table.push(row![
                    i,
                    kind.as_str(),
                    d,
                    r.pi_len,
                    r.tau_len,
                    fmt(r.epsilon),
                    fmt(r.localization_defect),
                    fmt(r.pressure_pi),
                    fmt(r.pressure_tau_of_upsi),
                    fmt(r.c),
                    fmt(r.rhs),
                    fmt(r.slack)
                ]);
                slacks.push(r.slack);
                hypotheses &= r.hypothesis_holds;
            }
            let worst = slacks.iter().copied().fold(f64::INFINITY, f64::min);
            out.check(
                format!("slack {}", kind.as_str()),
                worst >= -SLACK_TOL,
                format!(
                    "min slack over {} instances = {worst:.6e} (>= -{SLACK_TOL:e})",
                    slacks.len()
                ),
            );
            if kind == Kind::Localized {
                out.check(
                    "localization hypothesis",
                    hypotheses,
                    "|(Id - O) pi_k psi| <= epsilon for every localized instance",
                );
            }
            slacks.sort_by(f64::total_cmp);
            plot = plot.line(
                kind.as_str(),
                slacks
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (i as f64, *s))
                    .collect(),
            );
        }
        out.csv("eup_fuzz", &table)?;
        let reports: Vec<&EupReport> = results.iter().map(|r| &r.0).collect();
        out.json("eup_reports", &reports)?;
        out.plot("eup_fuzz", &plot)
    }
}
