use entlab_core::qpartitions::{fit_decay_rate, max_norm_profile};

use super::{lyapunov, mean, Experiment, Torus};
use crate::config::{Defaults, ExperimentConfig};
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

/// The mean rate must reach `Lambda / 2 - RATE_MARGIN`.
const RATE_MARGIN: f64 = 0.1;

pub struct NormDecay;

impl Experiment for NormDecay {
    fn name(&self) -> &'static str {
        "norm-decay"
    }

    fn about(&self) -> &'static str {
        "Exponential decay of max_{|a| = n} |P_a psi| for cat map eigenstates beyond the Ehrenfest time"
    }

    fn columns(&self) -> &'static str {
        "Config: eigenstates = eigenstates per N (evenly spaced in eigenphase order).\n\
         Outputs:\n  norm_decay.csv: N, eigenstate, n, max_norm   (n = 1..2 n_E)\n  \
         norm_decay_rates.csv: N, eigenstate, n_e, rate   (least-squares rate of ln max_norm over n in [n_E, 2 n_E])"
    }

    fn defaults(&self) -> Defaults {
        Defaults {
            n: vec![128, 256],
            ..Defaults::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let target = lyapunov() / 2.0 - RATE_MARGIN;
        let mut profiles = Table::new(&["N", "eigenstate", "n", "max_norm"]);
        let mut rates = Table::new(&["N", "eigenstate", "n_e", "rate"]);
        let mut plot = LinePlot::new(
            "Largest refined norm (eigenstate mean)",
            "n",
            "mean ln max |P_a psi|",
        );
        for &n in &cfg.n {
            let torus = Torus::new(cfg, n)?;
            let n_max = 2 * torus.n_e;
            let mut fitted = Vec::new();
            let mut log_sum = vec![0.0; n_max];
            let states = torus.eigenstates(cfg.eigenstates, cfg.seed)?;
            for (j, psi) in &states {
                let profile = max_norm_profile(psi, &torus.qp, &torus.u, n_max)?;
                for (d, v) in profile.iter().enumerate() {
                    profiles.push(row![n, j, d + 1, fmt(*v)]);
                    log_sum[d] += v.ln() / states.len() as f64;
                }
                let rate = fit_decay_rate(&profile, torus.n_e, n_max).ok_or_else(|| {
                    RunError::Compute(format!(
                        "no decay fit for N={n}, eigenstate {j}: too few positive values"
                    ))
                })?;
                rates.push(row![n, j, torus.n_e, fmt(rate)]);
                fitted.push(rate);
            }
            let m = mean(&fitted);
            out.check(
                format!("decay rate N={n}"),
                m >= target,
                format!(
                    "mean rate over {} eigenstates, n in [{}, {n_max}] = {m:.4} (>= Lambda/2 - {RATE_MARGIN} = {target:.4})",
                    fitted.len(),
                    torus.n_e
                ),
            );
            plot = plot.line(
                format!("N={n}"),
                log_sum
                    .iter()
                    .enumerate()
                    .map(|(d, v)| ((d + 1) as f64, *v))
                    .collect(),
            );
        }
        out.csv("norm_decay", &profiles)?;
        out.csv("norm_decay_rates", &rates)?;
        out.plot("norm_decay", &plot)
    }
}
