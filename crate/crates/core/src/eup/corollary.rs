use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::instance::{eup_rhs, EupReport};
use super::EupError;
use crate::classdyn::CoarseJacobian;
use crate::entropy::pressure;
use crate::numkernel::{operator_norm_exact, ComplexMatrix, C64};
use crate::qpartitions::{refined_weights, Ordering, QuantumPartition};
use crate::quantization::Propagator;
use crate::symbols::{check_cap, PressureWeights, SymbolSequence};

/// Pair count up to which the contraction coefficient is computed exhaustively.
pub const EXHAUSTIVE_PAIR_CAP: u64 = 1_000_000;
/// Pairs drawn when the exhaustive count is too large.
pub const SAMPLED_PAIRS: usize = 10_000;
/// Largest word table used by the corollary.
pub const COROLLARY_WORD_CAP: u64 = 1 << 16;

/// How weights `v_a = w_a` are attached to words.
#[derive(Debug, Clone)]
pub enum WeightScheme {
    Unit,
    /// `J_n(a)^{-1/2}` from a coarse unstable Jacobian.
    Jacobian(CoarseJacobian),
}

impl WeightScheme {
    pub fn name(&self) -> &'static str {
        match self {
            WeightScheme::Unit => "unit",
            WeightScheme::Jacobian(_) => "jacobian",
        }
    }

    pub fn weights(&self, k: usize, n: usize) -> Result<PressureWeights, EupError> {
        match self {
            WeightScheme::Unit => Ok(PressureWeights::uniform(k, n, 1.0)),
            WeightScheme::Jacobian(jac) => {
                if jac.alphabet() != k {
                    return Err(EupError::Invalid(format!(
                        "Jacobian over {} symbols used with {k} partition elements",
                        jac.alphabet()
                    )));
                }
                check_cap(k, n, COROLLARY_WORD_CAP)?;
                let alphas: Vec<SymbolSequence> = SymbolSequence::all(k, n).collect();
                jacobian_weights(&alphas, jac)
            }
        }
    }
}

/// `v_a = J_n(a)^{-1/2}` for words of one common length.
pub fn jacobian_weights(
    alphas: &[SymbolSequence],
    jac: &CoarseJacobian,
) -> Result<PressureWeights, EupError> {
    let n = alphas.first().map_or(0, |a| a.len());
    if alphas.iter().any(|a| a.len() != n) {
        return Err(EupError::Invalid("words must share one length".into()));
    }
    let k = jac.alphabet();
    let mut entries = Vec::with_capacity(alphas.len());
    for a in alphas {
        a.check_alphabet(k)?;
        entries.push((a.encode(k), (-0.5 * jac.log_jn(a)).exp()));
    }
    Ok(PressureWeights::from_entries(k, n, entries))
}

/// Corollary run on one eigenstate, with the pair accounting.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorollaryReport {
    pub report: EupReport,
    pub n: usize,
    pub weights: String,
    pub pairs_evaluated: u64,
    pub pairs_total: u64,
}

/// Products `X_a = P_{a_{n-1}} U ... U P_{a_0}` in code order.
fn forward_products(qp: &QuantumPartition, umat: &ComplexMatrix, n: usize) -> Vec<ComplexMatrix> {
    let mut level: Vec<ComplexMatrix> = (0..qp.len()).map(|s| qp.operator(s)).collect();
    for _ in 1..n {
        level = level
            .par_iter()
            .flat_map_iter(|m| {
                let um = umat.matmul(m);
                (0..qp.len())
                    .map(move |s| qp.apply_left(s, &um))
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    level
}

/// The weighted coefficient `max_{a, b} w_b v_a |P_b U^n P_a|` over words of length `n`.
///
/// Uses `|P_b U^n P_a| = |X_b U X_a|`. Returns `(c, pairs evaluated, pairs total)`;
/// above `EXHAUSTIVE_PAIR_CAP` pairs a seeded sample is used and `c` is a lower bound.
pub fn refined_contraction(
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    v: &PressureWeights,
    w: &PressureWeights,
    seed: u64,
) -> Result<(f64, u64, u64), EupError> {
    let words = check_cap(qp.len(), n, COROLLARY_WORD_CAP)? as usize;
    let umat = u.matrix();
    let x = forward_products(qp, umat, n);
    let ux: Vec<ComplexMatrix> = x.par_iter().map(|m| umat.matmul(m)).collect();
    let weight = |pw: &PressureWeights, code: usize| {
        pw.get_code(code as u64)
            .ok_or(EupError::Invalid("missing weight".into()))
    };
    let vv: Vec<f64> = (0..words).map(|c| weight(v, c)).collect::<Result<_, _>>()?;
    let ww: Vec<f64> = (0..words).map(|c| weight(w, c)).collect::<Result<_, _>>()?;
    let total = (words as u64) * (words as u64);
    let pairs: Vec<usize> = if total <= EXHAUSTIVE_PAIR_CAP {
        (0..total as usize).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample(&mut rng, total as usize, SAMPLED_PAIRS).into_vec()
    };
    let c = pairs
        .par_iter()
        .map(|&idx| {
            let (b, a) = (idx / words, idx % words);
            ww[b] * vv[a] * operator_norm_exact(&x[b].matmul(&ux[a]))
        })
        .reduce(|| 0.0, f64::max);
    Ok((c, pairs.len() as u64, total))
}

/// Instantiates the inequality with `pi = (P*_a)`, `tau = (P_a)`, isometry `U^n`,
/// `O = Id`, `epsilon = 0`, words of length `n`.
pub fn corollary_instance(
    psi: &[C64],
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    scheme: &WeightScheme,
    seed: u64,
) -> Result<CorollaryReport, EupError> {
    let k = qp.len();
    let v = scheme.weights(k, n)?;
    let w = v.clone();
    let (c, evaluated, total) = refined_contraction(qp, u, n, &v, &w, seed)?;
    let pi_weights = refined_weights(psi, qp, u, n, Ordering::Reversed, COROLLARY_WORD_CAP)?;
    let upsi = u.apply_power(psi, n as i64);
    let tau_weights = refined_weights(&upsi, qp, u, n, Ordering::Forward, COROLLARY_WORD_CAP)?;
    let pressure_pi = pressure(&pi_weights.weights, &v)?;
    let pressure_tau_of_upsi = pressure(&tau_weights.weights, &w)?;
    let words = check_cap(k, n, COROLLARY_WORD_CAP)? as usize;
    let rhs = eup_rhs(c, words, v.max(), w.max(), 0.0);
    Ok(CorollaryReport {
        report: EupReport {
            pressure_pi,
            pressure_tau_of_upsi,
            c,
            rhs,
            slack: pressure_pi + pressure_tau_of_upsi - rhs,
            localization_defect: 0.0,
            epsilon: 0.0,
            hypothesis_holds: true,
            advisory: evaluated < total,
            pi_len: words,
            tau_len: words,
            max_v: v.max(),
            max_w: w.max(),
        },
        n,
        weights: scheme.name().to_string(),
        pairs_evaluated: evaluated,
        pairs_total: total,
    })
}

/// Pressure of `psi` over words of length `n` with the `ordering` family.
pub fn refined_pressure(
    psi: &[C64],
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    ordering: Ordering,
    scheme: &WeightScheme,
) -> Result<f64, EupError> {
    let v = scheme.weights(qp.len(), n)?;
    let w = refined_weights(psi, qp, u, n, ordering, COROLLARY_WORD_CAP)?;
    Ok(pressure(&w.weights, &v)?)
}

/// `R = p_{n_o + n} - p_{n_o} - p_n`, zero when `n = 0`; requires `n_o + n <= n_e`.
#[allow(clippy::too_many_arguments)]
pub fn subadditivity_check(
    psi: &[C64],
    qp: &QuantumPartition,
    u: &Propagator,
    n_o: usize,
    n: usize,
    n_e: usize,
    scheme: &WeightScheme,
    ordering: Ordering,
) -> Result<f64, EupError> {
    if n == 0 {
        return Ok(0.0);
    }
    if n_o == 0 || n_o + n > n_e {
        return Err(EupError::Invalid(format!(
            "need 1 <= n_o and n_o + n <= n_E = {n_e}"
        )));
    }
    let p = |m: usize| refined_pressure(psi, qp, u, m, ordering, scheme);
    Ok(p(n_o + n)? - p(n_o)? - p(n)?)
}
