use entlab_core::eup::{basis_eup_report, SLACK_TOL};
use entlab_core::numkernel::random::random_state;
use entlab_core::numkernel::{dft_matrix, normalized, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{mean, Experiment};
use crate::config::{Defaults, ExperimentConfig};
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

const EQUALITY_TOL: f64 = 1e-9;

pub struct MaassenUffink;

impl Experiment for MaassenUffink {
    fn name(&self) -> &'static str {
        "maassen-uffink"
    }

    fn about(&self) -> &'static str {
        "h(psi) + h(F psi) >= log N for the discrete Fourier transform, with equality on position states"
    }

    fn columns(&self) -> &'static str {
        "Config: samples = random states per N.\n\
         Outputs:\n  maassen_uffink.csv: N, state, kind, entropy_position, entropy_momentum, log_n, slack\n    \
         kind is basis (state = position index) or random (state = sample index)"
    }

    fn defaults(&self) -> Defaults {
        Defaults {
            n: vec![8, 16, 32, 64, 128],
            samples: 1000,
            ..Defaults::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let mut table = Table::new(&[
            "N",
            "state",
            "kind",
            "entropy_position",
            "entropy_momentum",
            "log_n",
            "slack",
        ]);
        let mut sums = Vec::new();
        for &n in &cfg.n {
            let f = dft_matrix(n);
            let log_n = (n as f64).ln();
            let mut equality = 0.0f64;
            for k in 0..n {
                let mut psi = vec![C64::new(0.0, 0.0); n];
                psi[k] = C64::new(1.0, 0.0);
                let r = basis_eup_report(&f, &psi)?;
                equality = equality.max(r.slack.abs());
                table.push(row![
                    n,
                    k,
                    "basis",
                    fmt(r.pressure_pi),
                    fmt(r.pressure_tau_of_upsi),
                    fmt(log_n),
                    fmt(r.slack)
                ]);
            }
            let reports = (0..cfg.samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(((n as u64) << 32) | i as u64);
                    basis_eup_report(&f, &normalized(&random_state(n, &mut rng)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut worst = f64::INFINITY;
            for (i, r) in reports.iter().enumerate() {
                worst = worst.min(r.slack);
                table.push(row![
                    n,
                    i,
                    "random",
                    fmt(r.pressure_pi),
                    fmt(r.pressure_tau_of_upsi),
                    fmt(log_n),
                    fmt(r.slack)
                ]);
            }
            let total: Vec<f64> = reports
                .iter()
                .map(|r| r.pressure_pi + r.pressure_tau_of_upsi)
                .collect();
            sums.push((n as f64, mean(&total), log_n));
            out.check(
                format!("lower bound N={n}"),
                worst >= -SLACK_TOL,
                format!(
                    "min slack over {} random states = {worst:.6e} (>= -{SLACK_TOL:e})",
                    cfg.samples
                ),
            );
            out.check(
                format!("equality N={n}"),
                equality <= EQUALITY_TOL,
                format!("max |slack| on position states = {equality:.3e} (<= {EQUALITY_TOL:e})"),
            );
        }
        out.csv("maassen_uffink", &table)?;
        let plot = LinePlot::new("Entropy sum for the DFT", "N", "entropy")
            .line(
                "mean h(psi) + h(F psi), random states",
                sums.iter().map(|s| (s.0, s.1)).collect(),
            )
            .dashed("log N", sums.iter().map(|s| (s.0, s.2)).collect());
        out.plot("maassen_uffink", &plot)
    }
}
