use std::collections::BTreeSet;

use super::automorphism::ToralAutomorphism;
use super::measure::InvariantMeasure;
use super::partition::ArcPartition;
use super::ClassError;
use crate::symbols::{SymbolSequence, WeightVector};

/// Default penalty exponent for empty transitions, in units of `log lambda_plus`.
pub const DEFAULT_R_FACTOR: f64 = 20.0;

/// Unstable Jacobian discretized on pairs of arcs.
///
/// `J_1(a0, a1)` is the supremum of the unstable Jacobian over points of strip
/// `a0` whose image lies in strip `a1`. The Jacobian of a linear map is the
/// constant `1 / lambda_plus`, so the only information is whether the
/// transition is possible; impossible transitions get `e^{-R}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseJacobian {
    k: usize,
    lambda_plus: f64,
    r: f64,
    allowed: Vec<bool>,
}

impl CoarseJacobian {
    pub fn new(
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        r: f64,
    ) -> Result<Self, ClassError> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(ClassError::InvalidArgument(format!(
                "R must be positive, got {r}"
            )));
        }
        let k = partition.len();
        let mut allowed = vec![false; k * k];
        for a0 in 0..k {
            for a1 in 0..k {
                allowed[a0 * k + a1] = transition_nonempty(a, partition, a0, a1);
            }
        }
        Ok(Self {
            k,
            lambda_plus: a.lambda_plus(),
            r,
            allowed,
        })
    }

    /// Uses `R = 20 log lambda_plus`.
    pub fn with_default_r(a: &ToralAutomorphism, partition: &ArcPartition) -> Self {
        Self::new(a, partition, DEFAULT_R_FACTOR * a.log_lambda()).expect("default R is positive")
    }

    /// Marks a transition as impossible, e.g. to model a restricted symbolic system.
    pub fn forbid(mut self, a0: usize, a1: usize) -> Self {
        self.allowed[a0 * self.k + a1] = false;
        self
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_allowed(&self, a0: usize, a1: usize) -> bool {
        self.allowed[a0 * self.k + a1]
    }

    pub fn forbidden(&self) -> BTreeSet<(usize, usize)> {
        (0..self.k * self.k)
            .filter(|&i| !self.allowed[i])
            .map(|i| (i / self.k, i % self.k))
            .collect()
    }

    pub fn log_j1(&self, a0: usize, a1: usize) -> f64 {
        if self.is_allowed(a0, a1) {
            -self.lambda_plus.ln()
        } else {
            -self.r
        }
    }

    pub fn j1(&self, a0: usize, a1: usize) -> f64 {
        self.log_j1(a0, a1).exp()
    }

    /// `log J_n(alpha)`, the sum over consecutive pairs; zero for `|alpha| <= 1`.
    pub fn log_jn(&self, alpha: &SymbolSequence) -> f64 {
        (1..alpha.len())
            .map(|i| self.log_j1(alpha.symbol(i - 1), alpha.symbol(i)))
            .sum()
    }

    pub fn jn(&self, alpha: &SymbolSequence) -> f64 {
        self.log_jn(alpha).exp()
    }

    /// Smallest and largest `log J_n` over all words of length `n`, by dynamic programming.
    pub fn log_envelope(&self, n: usize) -> (f64, f64) {
        if n <= 1 {
            return (0.0, 0.0);
        }
        let k = self.k;
        let mut lo = vec![0.0f64; k];
        let mut hi = vec![0.0f64; k];
        for _ in 1..n {
            let mut nlo = vec![f64::INFINITY; k];
            let mut nhi = vec![f64::NEG_INFINITY; k];
            for a0 in 0..k {
                for a1 in 0..k {
                    let l = self.log_j1(a0, a1);
                    nlo[a1] = nlo[a1].min(lo[a0] + l);
                    nhi[a1] = nhi[a1].max(hi[a0] + l);
                }
            }
            lo = nlo;
            hi = nhi;
        }
        (
            lo.into_iter().fold(f64::INFINITY, f64::min),
            hi.into_iter().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// Rates and constant `(C, rate_fast, rate_slow)` with
    /// `C^{-1} e^{-n rate_fast} <= J_n <= C e^{-n rate_slow}` for every `n >= 1`.
    pub fn decay_constants(&self) -> (f64, f64, f64) {
        let logs: Vec<f64> = (0..self.k * self.k)
            .map(|i| self.log_j1(i / self.k, i % self.k))
            .collect();
        let fast = -logs.iter().copied().fold(f64::INFINITY, f64::min);
        let slow = -logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // J_n has n - 1 factors, so one factor's worth of slack covers the offset.
        let c = fast.max(slow).exp().max(1.0);
        (c, fast, slow)
    }

    /// `sum_alpha w_alpha log J_n(alpha)` for a table of depth `n`.
    pub fn expected_log_jacobian(&self, weights: &WeightVector) -> f64 {
        weights
            .iter()
            .map(|(alpha, w)| w * self.log_jn(&alpha))
            .sum()
    }
}

fn transition_nonempty(
    a: &ToralAutomorphism,
    partition: &ArcPartition,
    a0: usize,
    a1: usize,
) -> bool {
    let (ma, mb, _, _) = a.entries();
    if mb != 0 {
        // The momentum sweeps a full period of the image position.
        return true;
    }
    // Only reachable for non-hyperbolic matrices; kept for completeness.
    let (s, e) = partition.arc(a0);
    let samples = 64;
    (0..samples).any(|i| {
        let x = s + (e - s) * (i as f64 + 0.5) / samples as f64;
        partition.arc_of(ma as f64 * x) == a1
    })
}

/// `|integral of log J^u dmu|`, equal to `log lambda_plus` for every probability measure here.
pub fn ruelle_bound(mu: &InvariantMeasure, a: &ToralAutomorphism) -> Result<f64, ClassError> {
    mu.validate(a)?;
    Ok(a.log_lambda())
}

/// Coarse-grained bound `-(n_o - 1)/n_o * sum mu(E_{a0 a1}) log J_1(a0, a1)` from a
/// depth-2 cylinder table.
pub fn coarse_ruelle_bound(
    pairs: &WeightVector,
    jac: &CoarseJacobian,
    n_o: usize,
) -> Result<f64, ClassError> {
    if pairs.depth() != 2 {
        return Err(ClassError::InvalidArgument(format!(
            "coarse Ruelle bound needs a depth-2 table, got depth {}",
            pairs.depth()
        )));
    }
    if n_o == 0 {
        return Err(ClassError::InvalidArgument("n_o must be positive".into()));
    }
    let avg = jac.expected_log_jacobian(pairs);
    Ok(-(n_o as f64 - 1.0) / n_o as f64 * avg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat_jac(k: usize) -> CoarseJacobian {
        let a = ToralAutomorphism::cat();
        CoarseJacobian::with_default_r(&a, &ArcPartition::uniform(k).unwrap())
    }

    #[test]
    fn all_transitions_allowed_for_cat_map() {
        let j = cat_jac(4);
        assert!(j.forbidden().is_empty());
        assert!((j.j1(0, 3) - 0.38196601125010515).abs() < 1e-15);
        let trivial = cat_jac(1);
        assert!((trivial.j1(0, 0) - 0.38196601125010515).abs() < 1e-15);
    }

    #[test]
    fn forbidden_transition_uses_penalty() {
        let j = cat_jac(2).forbid(1, 0);
        assert!((j.j1(1, 0) - (-j.r()).exp()).abs() < 1e-300);
        assert!((j.r() - 20.0 * ToralAutomorphism::cat().log_lambda()).abs() < 1e-12);
    }

    #[test]
    fn products() {
        let j = cat_jac(3);
        let lp = ToralAutomorphism::cat().lambda_plus();
        let alpha = SymbolSequence::new(vec![0, 2, 1, 1, 0]);
        assert!((j.jn(&alpha) - lp.powi(-4)).abs() < 1e-15);
        assert_eq!(j.jn(&SymbolSequence::new(vec![2])), 1.0);
        let pair = SymbolSequence::new(vec![1, 2]);
        assert_eq!(j.jn(&pair), j.j1(1, 2));
    }

    #[test]
    fn envelope_matches_brute_force() {
        let j = cat_jac(3).forbid(0, 1).forbid(2, 2);
        for n in 1..5 {
            let (lo, hi) = j.log_envelope(n);
            let all: Vec<f64> = SymbolSequence::all(3, n).map(|s| j.log_jn(&s)).collect();
            let blo = all.iter().copied().fold(f64::INFINITY, f64::min);
            let bhi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!((lo - blo).abs() < 1e-12 && (hi - bhi).abs() < 1e-12);
        }
    }
}
