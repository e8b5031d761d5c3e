use rayon::prelude::*;
use serde::Serialize;

use super::functionals::shannon_entropy;
use super::EntropyError;
use crate::classdyn::{
    cylinder_weights, cylinder_weights_by_depth, ArcPartition, CoarseJacobian, InvariantMeasure,
    LebesgueWeigher, ToralAutomorphism, TorusPoint,
};
use crate::qpartitions::SmoothPartition;
use crate::symbols::{sequence_count, WeightVector};

/// Tolerance used when checking `h_{n+m} <= h_n + h_m` on computed tables.
pub const SUBADDITIVITY_TOL: f64 = 1e-9;

/// `h_n(mu, P) = sum_{|a| = n} eta(mu(E_a))`.
pub fn classical_refined_entropy(
    mu: &InvariantMeasure,
    a: &ToralAutomorphism,
    partition: &ArcPartition,
    n: usize,
    weigher: &dyn LebesgueWeigher,
) -> Result<f64, EntropyError> {
    Ok(shannon_entropy(&cylinder_weights(
        mu, a, partition, n, weigher,
    )?))
}

/// Entropy estimates from refined entropies `h_1, ..., h_{n_max}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KsEstimate {
    /// `h_n` for `n = 1..=n_max`.
    pub entropies: Vec<f64>,
    /// `inf_n h_n / n`.
    pub inf_ratio: f64,
    /// `h_{n+1} - h_n` for `n = 1..n_max`.
    pub differences: Vec<f64>,
    /// Last difference `h_{n_max} - h_{n_max - 1}` (or `h_1` when `n_max = 1`).
    pub difference_estimate: f64,
    /// Whether `h_{n+m} <= h_n + h_m` held for every computed pair.
    pub subadditive: bool,
}

impl KsEstimate {
    pub fn from_entropies(entropies: Vec<f64>) -> Self {
        let inf_ratio = entropies
            .iter()
            .enumerate()
            .map(|(i, h)| h / (i + 1) as f64)
            .fold(f64::INFINITY, f64::min);
        let differences: Vec<f64> = entropies.windows(2).map(|w| w[1] - w[0]).collect();
        let difference_estimate = differences
            .last()
            .copied()
            .unwrap_or_else(|| entropies.first().copied().unwrap_or(0.0));
        let n = entropies.len();
        let mut subadditive = true;
        for i in 1..=n {
            for j in 1..=n - i {
                if entropies[i + j - 1] > entropies[i - 1] + entropies[j - 1] + SUBADDITIVITY_TOL {
                    subadditive = false;
                }
            }
        }
        Self {
            entropies,
            inf_ratio,
            differences,
            difference_estimate,
            subadditive,
        }
    }
}

/// Refined entropies up to `n_max` and the derived estimates.
pub fn ks_entropy_estimate(
    mu: &InvariantMeasure,
    a: &ToralAutomorphism,
    partition: &ArcPartition,
    n_max: usize,
    weigher: &dyn LebesgueWeigher,
    cap: u64,
) -> Result<KsEstimate, EntropyError> {
    if n_max == 0 {
        return Err(EntropyError::InvalidArgument(
            "n_max must be at least 1".into(),
        ));
    }
    let tables = cylinder_weights_by_depth(mu, a, partition, n_max, weigher, cap)?;
    Ok(KsEstimate::from_entropies(
        tables.iter().map(shannon_entropy).collect(),
    ))
}

/// `p_n = h_n + sum_a mu(E_a) log J_n(a)`.
pub fn classical_pressure(weights: &WeightVector, jac: &CoarseJacobian) -> f64 {
    shannon_entropy(weights)
        + weights
            .iter()
            .map(|(alpha, w)| w * jac.log_jn(&alpha))
            .sum::<f64>()
}

/// `p_{n+m} - p_n - p_m` from the tables at depths `n`, `m` and `n + m`.
pub fn classical_subadditivity_defect(
    by_depth: &[WeightVector],
    jac: &CoarseJacobian,
    n: usize,
    m: usize,
) -> Result<f64, EntropyError> {
    if n == 0 || m == 0 {
        return Ok(0.0);
    }
    let table = |d: usize| {
        by_depth
            .get(d - 1)
            .ok_or_else(|| EntropyError::InvalidArgument(format!("no weight table at depth {d}")))
    };
    Ok(classical_pressure(table(n + m)?, jac)
        - classical_pressure(table(n)?, jac)
        - classical_pressure(table(m)?, jac))
}

/// `mu(prod_j f_{a_j}^2 o A^j)` for all words of length `n`.
///
/// Atoms are evaluated exactly; the Lebesgue part uses the midpoint rule on a
/// `side x side` grid, which is accurate for smooth periodic integrands.
pub fn smoothed_cylinder_weights(
    mu: &InvariantMeasure,
    a: &ToralAutomorphism,
    sp: &SmoothPartition,
    n: usize,
    side: usize,
    cap: u64,
) -> Result<WeightVector, EntropyError> {
    mu.validate(a)?;
    let k = sp.len();
    let count = sequence_count(k, n)
        .filter(|&c| c <= cap)
        .ok_or(EntropyError::CapExceeded { k, n, cap })?;
    let mut dense = vec![0.0; count as usize];
    let leb = mu.lebesgue_mass();
    if leb > 0.0 && side > 0 {
        let cell = leb / (side * side) as f64;
        let rows: Vec<Vec<f64>> = (0..side)
            .into_par_iter()
            .map(|i| {
                let mut local = vec![0.0; count as usize];
                for j in 0..side {
                    let z = TorusPoint::new(
                        (i as f64 + 0.5) / side as f64,
                        (j as f64 + 0.5) / side as f64,
                    );
                    accumulate(a, sp, z, n, cell, &mut local);
                }
                local
            })
            .collect();
        for row in rows {
            for (d, r) in dense.iter_mut().zip(row) {
                *d += r;
            }
        }
    }
    for (pt, mass) in mu.atoms() {
        accumulate(a, sp, pt.to_point(), n, mass, &mut dense);
    }
    Ok(WeightVector::dense(k, n, dense))
}

fn accumulate(
    a: &ToralAutomorphism,
    sp: &SmoothPartition,
    z: TorusPoint,
    n: usize,
    mass: f64,
    out: &mut [f64],
) {
    let mut squares: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pt = z;
    for _ in 0..n {
        squares.push(sp.values(pt.x).into_iter().map(|v| v * v).collect());
        pt = a.apply(pt);
    }
    spread(&squares, 0, 0, mass, out);
}

fn spread(squares: &[Vec<f64>], depth: usize, code: usize, acc: f64, out: &mut [f64]) {
    let k = squares[0].len();
    if depth == squares.len() {
        out[code] += acc;
        return;
    }
    for (s, &f2) in squares[depth].iter().enumerate() {
        if f2 > 0.0 {
            spread(squares, depth + 1, code * k + s, acc * f2, out);
        }
    }
}
