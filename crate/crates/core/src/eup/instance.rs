use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EupError;
use crate::entropy::{pressure, shannon_entropy_of};
use crate::numkernel::random::random_isometry;
use crate::numkernel::{norm, norm_sqr, operator_norm_exact, ComplexMatrix, C64};
use crate::symbols::{PressureWeights, WeightVector};

/// Accepted defect in `sum_k pi_k^* pi_k = Id` and `U^* U = Id`.
pub const INSTANCE_TOL: f64 = 1e-10;
/// Slack below which a report counts as a violation.
pub const SLACK_TOL: f64 = 1e-9;

/// Data of the weighted uncertainty inequality on `C^d`.
#[derive(Debug, Clone)]
pub struct EupInstance {
    pi: Vec<ComplexMatrix>,
    tau: Vec<ComplexMatrix>,
    u: ComplexMatrix,
    o: ComplexMatrix,
    v: PressureWeights,
    w: PressureWeights,
    epsilon: f64,
}

/// Outcome of checking the inequality on one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EupReport {
    pub pressure_pi: f64,
    pub pressure_tau_of_upsi: f64,
    pub c: f64,
    pub rhs: f64,
    pub slack: f64,
    pub localization_defect: f64,
    pub epsilon: f64,
    /// Whether `localization_defect <= epsilon`.
    pub hypothesis_holds: bool,
    /// Whether `c` came from a sampled subset of pairs (then only a lower bound).
    pub advisory: bool,
    pub pi_len: usize,
    pub tau_len: usize,
    pub max_v: f64,
    pub max_w: f64,
}

impl EupReport {
    /// True when the hypothesis holds and the slack is within tolerance.
    pub fn passes(&self) -> bool {
        !self.hypothesis_holds || self.slack >= -SLACK_TOL
    }
}

fn identity_defect(family: &[ComplexMatrix], d: usize) -> f64 {
    let mut sum = ComplexMatrix::zeros(d, d);
    for p in family {
        sum = &sum + &p.adjoint().matmul(p);
    }
    sum.max_abs_diff(&ComplexMatrix::identity(d))
}

fn word_count(v: &PressureWeights) -> usize {
    v.alphabet().pow(v.depth() as u32)
}

impl EupInstance {
    pub fn new(
        pi: Vec<ComplexMatrix>,
        tau: Vec<ComplexMatrix>,
        u: ComplexMatrix,
        o: ComplexMatrix,
        v: PressureWeights,
        w: PressureWeights,
        epsilon: f64,
    ) -> Result<Self, EupError> {
        let d = u.rows();
        if !u.is_square() || !o.is_square() || o.rows() != d {
            return Err(EupError::Invalid(
                "U and O must be square of the same size".into(),
            ));
        }
        if pi.is_empty() || tau.is_empty() {
            return Err(EupError::Invalid("partitions must be nonempty".into()));
        }
        if pi
            .iter()
            .chain(&tau)
            .any(|p| p.rows() != d || p.cols() != d)
        {
            return Err(EupError::Invalid(format!(
                "partition elements must be {d} x {d}"
            )));
        }
        let defect = identity_defect(&pi, d).max(identity_defect(&tau, d));
        if defect > INSTANCE_TOL {
            return Err(EupError::Invalid(format!(
                "partition of unity defect {defect:.3e}"
            )));
        }
        let ud = u.unitarity_defect();
        if ud > INSTANCE_TOL {
            return Err(EupError::Invalid(format!("isometry defect {ud:.3e}")));
        }
        if word_count(&v) != pi.len() || word_count(&w) != tau.len() {
            return Err(EupError::Invalid(
                "weight families do not match partition sizes".into(),
            ));
        }
        if v.entries().len() != pi.len()
            || w.entries().len() != tau.len()
            || v.min() <= 0.0
            || w.min() <= 0.0
        {
            return Err(EupError::Invalid(
                "weights must be positive and defined on every index".into(),
            ));
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(EupError::Invalid(format!(
                "epsilon {epsilon} must be nonnegative"
            )));
        }
        Ok(Self {
            pi,
            tau,
            u,
            o,
            v,
            w,
            epsilon,
        })
    }

    /// Unit weights, `O = Id`, `epsilon = 0`.
    pub fn plain(
        pi: Vec<ComplexMatrix>,
        tau: Vec<ComplexMatrix>,
        u: ComplexMatrix,
    ) -> Result<Self, EupError> {
        let d = u.rows();
        let (np, nt) = (pi.len(), tau.len());
        Self::new(
            pi,
            tau,
            u,
            ComplexMatrix::identity(d),
            PressureWeights::uniform(np, 1, 1.0),
            PressureWeights::uniform(nt, 1, 1.0),
            0.0,
        )
    }

    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn pi(&self) -> &[ComplexMatrix] {
        &self.pi
    }

    pub fn tau(&self) -> &[ComplexMatrix] {
        &self.tau
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn o(&self) -> &ComplexMatrix {
        &self.o
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn v(&self) -> &PressureWeights {
        &self.v
    }

    pub fn w(&self) -> &PressureWeights {
        &self.w
    }
}

/// `sup_{j,k} w_j v_k |tau_j U pi_k^* O|`.
pub fn contraction_coefficient(inst: &EupInstance) -> f64 {
    let right: Vec<ComplexMatrix> = inst
        .pi
        .par_iter()
        .map(|p| inst.u.matmul(&p.adjoint()).matmul(&inst.o))
        .collect();
    let v: Vec<f64> = inst.v.entries().iter().map(|e| e.1).collect();
    let w: Vec<f64> = inst.w.entries().iter().map(|e| e.1).collect();
    (0..inst.tau.len() * inst.pi.len())
        .into_par_iter()
        .map(|idx| {
            let (j, k) = (idx / inst.pi.len(), idx % inst.pi.len());
            w[j] * v[k] * operator_norm_exact(&inst.tau[j].matmul(&right[k]))
        })
        .reduce(|| 0.0, f64::max)
}

/// `max_k |(Id - O) pi_k psi|`.
pub fn localization_defect(psi: &[C64], pi: &[ComplexMatrix], o: &ComplexMatrix) -> f64 {
    pi.iter()
        .map(|p| {
            let x = p.matvec(psi);
            let ox = o.matvec(&x);
            let diff: Vec<C64> = x.iter().zip(&ox).map(|(a, b)| a - b).collect();
            norm(&diff)
        })
        .fold(0.0, f64::max)
}

fn family_pressure(
    family: &[ComplexMatrix],
    psi: &[C64],
    weights: &PressureWeights,
) -> Result<f64, EupError> {
    let norms: Vec<f64> = family.iter().map(|p| norm_sqr(&p.matvec(psi))).collect();
    let table = WeightVector::dense(weights.alphabet(), weights.depth(), norms);
    Ok(pressure(&table, weights)?)
}

/// `-2 log(c + N V W epsilon)`.
pub fn eup_rhs(c: f64, pi_len: usize, max_v: f64, max_w: f64, epsilon: f64) -> f64 {
    -2.0 * (c + pi_len as f64 * max_v * max_w * epsilon).ln()
}

/// Evaluates both pressures and the bound for a normalized `psi`.
pub fn check_eup(inst: &EupInstance, psi: &[C64]) -> Result<EupReport, EupError> {
    if psi.len() != inst.dim() {
        return Err(EupError::Invalid(format!(
            "state of length {} for dimension {}",
            psi.len(),
            inst.dim()
        )));
    }
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(EupError::Invalid(format!("state norm {nrm}")));
    }
    let c = contraction_coefficient(inst);
    let upsi = inst.u.matvec(psi);
    let pressure_pi = family_pressure(&inst.pi, psi, &inst.v)?;
    let pressure_tau_of_upsi = family_pressure(&inst.tau, &upsi, &inst.w)?;
    let defect = localization_defect(psi, &inst.pi, &inst.o);
    let (max_v, max_w) = (inst.v.max(), inst.w.max());
    let rhs = eup_rhs(c, inst.pi.len(), max_v, max_w, inst.epsilon);
    Ok(EupReport {
        pressure_pi,
        pressure_tau_of_upsi,
        c,
        rhs,
        slack: pressure_pi + pressure_tau_of_upsi - rhs,
        localization_defect: defect,
        epsilon: inst.epsilon,
        hypothesis_holds: defect <= inst.epsilon,
        advisory: false,
        pi_len: inst.pi.len(),
        tau_len: inst.tau.len(),
        max_v,
        max_w,
    })
}

/// `count` blocks of a random isometry `C^d -> C^{count d}`; they satisfy
/// `sum_k pi_k^* pi_k = Id` by construction.
pub fn random_partition_of_unity<R: Rng + ?Sized>(
    d: usize,
    count: usize,
    rng: &mut R,
) -> Vec<ComplexMatrix> {
    let iso = random_isometry(count * d, d, rng);
    (0..count)
        .map(|k| ComplexMatrix::from_fn(d, d, |i, j| iso[(k * d + i, j)]))
        .collect()
}

/// Orthogonal projector onto the span of `vectors` in `C^d`.
///
/// Vectors are orthogonalized in order (two Gram-Schmidt passes); those with a
/// residual below `1e-8` relative to their norm are dropped as dependent.
pub fn span_projector(vectors: &[Vec<C64>], d: usize) -> Result<ComplexMatrix, EupError> {
    if vectors.iter().any(|v| v.len() != d) {
        return Err(EupError::Invalid(format!(
            "spanning vectors must have length {d}"
        )));
    }
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let scale = norm(v);
        let mut x = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c: C64 = b.iter().zip(&x).map(|(p, q)| p.conj() * q).sum();
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= c * bi;
                }
            }
        }
        let r = norm(&x);
        if basis.len() < d && scale > 0.0 && r > 1e-8 * scale {
            basis.push(x.iter().map(|z| z / r).collect());
        }
    }
    let mut o = ComplexMatrix::zeros(d, d);
    for b in &basis {
        for i in 0..d {
            for j in 0..d {
                o[(i, j)] += b[i] * b[j].conj();
            }
        }
    }
    Ok(o)
}

/// Orthogonal projectors on the standard basis of `C^d`.
pub fn basis_projectors(d: usize) -> Vec<ComplexMatrix> {
    (0..d)
        .map(|k| {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(k, k)] = C64::new(1.0, 0.0);
            m
        })
        .collect()
}

/// The basis case (`pi = tau` = standard basis projectors, unit weights, `O = Id`):
/// `h(U psi) + h(psi) >= -2 log max_{j,k} |U_jk|`, computed without forming the projectors.
pub fn basis_eup_report(u: &ComplexMatrix, psi: &[C64]) -> Result<EupReport, EupError> {
    if !u.is_square() || u.rows() != psi.len() {
        return Err(EupError::Invalid(
            "U must be square and match the state".into(),
        ));
    }
    let ud = u.unitarity_defect();
    if ud > INSTANCE_TOL {
        return Err(EupError::Invalid(format!("isometry defect {ud:.3e}")));
    }
    let c = u.max_abs();
    let p: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let up: Vec<f64> = u.matvec(psi).iter().map(|z| z.norm_sqr()).collect();
    let pressure_pi = shannon_entropy_of(&p)?;
    let pressure_tau_of_upsi = shannon_entropy_of(&up)?;
    let rhs = -2.0 * c.ln();
    Ok(EupReport {
        pressure_pi,
        pressure_tau_of_upsi,
        c,
        rhs,
        slack: pressure_pi + pressure_tau_of_upsi - rhs,
        localization_defect: 0.0,
        epsilon: 0.0,
        hypothesis_holds: true,
        advisory: false,
        pi_len: psi.len(),
        tau_len: psi.len(),
        max_v: 1.0,
        max_w: 1.0,
    })
}
