use entlab_core::numkernel::{ComplexMatrix, C64};
use entlab_core::quantization::{egorov_defect_bound, Observable, QuantumState};
use rayon::prelude::*;

use super::{Experiment, Torus};
use crate::config::{Defaults, ExperimentConfig};
use crate::output::{fmt, RunOutput, Table};
use crate::plot::LinePlot;
use crate::{row, RunError};

const UNITARITY_TOL: f64 = 1e-10;
const EGOROV_TOL: f64 = 1e-9;
/// Fourier modes `T(p, q)` with `|p|, |q| <= MODE_RANGE` are tested.
const MODE_RANGE: i64 = 3;

pub struct Egorov;

impl Experiment for Egorov {
    fn name(&self) -> &'static str {
        "egorov"
    }

    fn about(&self) -> &'static str {
        "Unitarity of the quantized cat map and exact Egorov intertwining U^-t Op(a) U^t = Op(a o A^t)"
    }

    fn columns(&self) -> &'static str {
        "Outputs:\n  egorov.csv: N, t, unitarity_defect, max_egorov_defect\n    unitarity_defect = |U*U - I|_F; max_egorov_defect = max over |p|,|q| <= 3 of |Op(a) U^t - U^t Op(a o A^t)|_F"
    }

    fn defaults(&self) -> Defaults {
        Defaults {
            n: vec![8, 16, 32, 64, 128, 256, 512],
            ..Defaults::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut RunOutput) -> Result<(), RunError> {
        let mut table = Table::new(&["N", "t", "unitarity_defect", "max_egorov_defect"]);
        let mut plot = LinePlot::new("Egorov defect", "t", "log10 max defect");
        for &n in &cfg.n {
            let torus = Torus::new(cfg, n)?;
            let m = torus.u.matrix();
            let unitarity = (&m.adjoint().matmul(m) - &ComplexMatrix::identity(n)).frobenius_norm();
            let modes: Vec<Observable> = (-MODE_RANGE..=MODE_RANGE)
                .flat_map(|p| {
                    (-MODE_RANGE..=MODE_RANGE).map(move |q| Observable::fourier_mode(p, q))
                })
                .collect();
            let mut columns: Vec<Vec<C64>> = (0..n)
                .map(|k| QuantumState::position(&torus.space, k).into_amplitudes())
                .collect();
            let mut worst = 0.0f64;
            let mut series = Vec::new();
            for t in 1..=torus.n_e {
                columns = columns.par_iter().map(|c| torus.u.apply(c)).collect();
                let ut = ComplexMatrix::from_columns(&columns)?;
                let defect = modes
                    .par_iter()
                    .map(|a| egorov_defect_bound(&torus.u, &ut, a, t as i64))
                    .reduce(|| 0.0, f64::max);
                worst = worst.max(defect);
                table.push(row![n, t, fmt(unitarity), fmt(defect)]);
                series.push((t as f64, defect.max(1e-300).log10()));
            }
            plot = plot.line(format!("N={n}"), series);
            out.check(
                format!("unitarity N={n}"),
                unitarity <= UNITARITY_TOL,
                format!("|U*U - I|_F = {unitarity:.3e} (<= {UNITARITY_TOL:e})"),
            );
            out.check(
                format!("egorov N={n}"),
                worst <= EGOROV_TOL,
                format!(
                    "max defect over t <= {} = {worst:.3e} (<= {EGOROV_TOL:e})",
                    torus.n_e
                ),
            );
        }
        out.csv("egorov", &table)?;
        out.plot("egorov", &plot)
    }
}
