use super::EntropyError;
use crate::symbols::{PressureWeights, WeightVector};

/// Weights within this distance outside `[0, 1]` are clamped rather than rejected.
const RANGE_SLACK: f64 = 1e-12;

/// `eta(s) = -s log s`, with `eta(0) = 0`.
pub fn eta(s: f64) -> Result<f64, EntropyError> {
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&s) {
        return Err(EntropyError::OutOfRange(s));
    }
    Ok(eta_clamped(s))
}

pub(crate) fn eta_clamped(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    if s == 0.0 {
        0.0
    } else {
        -s * s.ln()
    }
}

/// `sum_i eta(w_i)` over a slice.
pub fn shannon_entropy_of(weights: &[f64]) -> Result<f64, EntropyError> {
    weights.iter().map(|&w| eta(w)).sum()
}

/// `sum_a eta(w_a)`.
pub fn shannon_entropy(w: &WeightVector) -> f64 {
    w.values().map(eta_clamped).sum()
}

/// `sum_a eta(w_a) - sum_a w_a log v_a^2`.
///
/// Every word carrying positive weight must have a pressure weight.
pub fn pressure(w: &WeightVector, v: &PressureWeights) -> Result<f64, EntropyError> {
    if w.alphabet() != v.alphabet() || w.depth() != v.depth() {
        return Err(EntropyError::LabelMismatch(format!(
            "weights over {}^{} words, pressure weights over {}^{}",
            w.alphabet(),
            w.depth(),
            v.alphabet(),
            v.depth()
        )));
    }
    let mut total = 0.0;
    for &(code, p) in w.entries() {
        total += eta_clamped(p);
        if p != 0.0 {
            let va = v.get_code(code).ok_or_else(|| {
                EntropyError::LabelMismatch(format!("no pressure weight for word code {code}"))
            })?;
            total -= 2.0 * p * va.ln();
        }
    }
    Ok(total)
}
