use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partition::QuantumPartition;
use super::QPartError;
use crate::numkernel::{norm_sqr, ComplexMatrix, C64};
use crate::quantization::Propagator;
use crate::symbols::{check_cap, SymbolSequence, WeightVector};

/// Default cap on the number of words in a weight table.
pub const DEFAULT_WEIGHT_CAP: u64 = 1 << 20;
/// Subtrees are handed to separate tasks once this many prefixes exist.
const PARALLEL_FRONTIER: usize = 64;

/// Which time ordering the refined operators use.
///
/// `Forward` is `P_a = P_{a_{n-1}}(n-1) ... P_{a_1}(1) P_{a_0}` and `Reversed`
/// is `P*_a = P_{a_0} P_{a_1}(1) ... P_{a_{n-1}}(n-1)`, with `A(t) = U^{-t} A U^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    #[default]
    Forward,
    Reversed,
}

impl Ordering {
    pub fn as_str(self) -> &'static str {
        match self {
            Ordering::Forward => "forward",
            Ordering::Reversed => "reversed",
        }
    }
}

/// Table of `|P_a psi|^2` (or `|P*_a psi|^2`) over all words of one length.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedWeights {
    pub ordering: Ordering,
    pub weights: WeightVector,
}

impl RefinedWeights {
    pub fn depth(&self) -> usize {
        self.weights.depth()
    }

    pub fn alphabet(&self) -> usize {
        self.weights.alphabet()
    }

    pub fn get(&self, alpha: &SymbolSequence) -> f64 {
        self.weights.get(alpha)
    }

    pub fn total(&self) -> f64 {
        self.weights.total()
    }

    /// `symbols,weight` rows in code order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("symbols,weight\n");
        for (alpha, w) in self.weights.iter() {
            let _ = writeln!(out, "{alpha},{w:.17e}");
        }
        out
    }
}

fn check_inputs(qp: &QuantumPartition, u: &Propagator) -> Result<(), QPartError> {
    if qp.dim() != u.dim() {
        return Err(QPartError::Dimension {
            expected: u.dim(),
            found: qp.dim(),
        });
    }
    Ok(())
}

/// Dense matrix of `P_a` or `P*_a`.
pub fn refined_operator(
    qp: &QuantumPartition,
    u: &Propagator,
    alpha: &SymbolSequence,
    ordering: Ordering,
    cap: u64,
) -> Result<ComplexMatrix, QPartError> {
    check_inputs(qp, u)?;
    let n = alpha.len();
    if n == 0 {
        return Err(QPartError::EmptyWord);
    }
    alpha.check_alphabet(qp.len())?;
    check_cap(qp.len(), n, cap)?;
    let matrix = u.matrix();
    let symbols: Vec<usize> = alpha.symbols().collect();
    match ordering {
        Ordering::Forward => {
            let mut m = qp.operator(symbols[0]);
            for &s in &symbols[1..] {
                m = qp.apply_left(s, &matrix.matmul(&m));
            }
            Ok(if n > 1 {
                u.power(-(n as i64 - 1)).matmul(&m)
            } else {
                m
            })
        }
        Ordering::Reversed => {
            let mut m = qp.apply_left(symbols[n - 1], &u.power(n as i64 - 1));
            let inverse = matrix.adjoint();
            for &s in symbols[..n - 1].iter().rev() {
                m = qp.apply_left(s, &inverse.matmul(&m));
            }
            Ok(m)
        }
    }
}

/// Squared norms of all words of depths `1..=n` along the recursion
/// `phi_1 = P_{a_0} root`, `phi_{j+1} = P_{a_j} step(phi_j)`.
///
/// Level `j - 1` of the result is the dense table for depth `j` in code order.
pub(crate) fn tree_levels<F>(
    qp: &QuantumPartition,
    step: &F,
    root: &[C64],
    n: usize,
) -> Vec<Vec<f64>>
where
    F: Fn(&[C64]) -> Vec<C64> + Sync,
{
    let k = qp.len();
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(n);
    // Breadth-first until the frontier is wide enough to split across tasks.
    let mut frontier: Vec<Option<Vec<C64>>> = vec![Some(root.to_vec())];
    let mut depth = 0;
    while depth < n && (depth == 0 || frontier.len() < PARALLEL_FRONTIER) {
        let mut next = Vec::with_capacity(frontier.len() * k);
        let mut level = Vec::with_capacity(frontier.len() * k);
        for node in &frontier {
            match node {
                Some(phi) => {
                    let evolved = if depth == 0 { phi.clone() } else { step(phi) };
                    for s in 0..k {
                        let child = qp.apply(s, &evolved);
                        let w = norm_sqr(&child);
                        level.push(w);
                        next.push(if w > 0.0 { Some(child) } else { None });
                    }
                }
                None => {
                    level.extend(std::iter::repeat_n(0.0, k));
                    next.extend(std::iter::repeat_n(None, k));
                }
            }
        }
        levels.push(level);
        frontier = next;
        depth += 1;
    }
    if depth == n {
        return levels;
    }
    let remaining = n - depth;
    let blocks: Vec<Vec<Vec<f64>>> = frontier
        .par_iter()
        .map(|node| {
            let mut local: Vec<Vec<f64>> = (1..=remaining)
                .map(|j| vec![0.0; k.pow(j as u32)])
                .collect();
            if let Some(phi) = node {
                descend(qp, step, phi, 0, 0, &mut local);
            }
            local
        })
        .collect();
    for j in 0..remaining {
        levels.push(blocks.iter().flat_map(|b| b[j].iter().copied()).collect());
    }
    levels
}

fn descend<F>(
    qp: &QuantumPartition,
    step: &F,
    phi: &[C64],
    depth: usize,
    code: usize,
    out: &mut [Vec<f64>],
) where
    F: Fn(&[C64]) -> Vec<C64> + Sync,
{
    let k = qp.len();
    let evolved = step(phi);
    for s in 0..k {
        let child = qp.apply(s, &evolved);
        let w = norm_sqr(&child);
        let child_code = code * k + s;
        out[depth][child_code] = w;
        if w > 0.0 && depth + 1 < out.len() {
            descend(qp, step, &child, depth + 1, child_code, out);
        }
    }
}

/// `|P_a psi|^2` (forward) or `|P*_a psi|^2` (reversed) for every word of length `n`.
///
/// The reversed table uses `P*_a psi = P_{a_0} U^{-1} P_{a_1} ... U^{-1} P_{a_{n-1}} U^{n-1} psi`,
/// which is the forward recursion for `U^{-1}` started at `U^{n-1} psi` and read
/// along the reversed word.
pub fn refined_weights(
    psi: &[C64],
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    ordering: Ordering,
    cap: u64,
) -> Result<RefinedWeights, QPartError> {
    check_inputs(qp, u)?;
    if psi.len() != u.dim() {
        return Err(QPartError::Dimension {
            expected: u.dim(),
            found: psi.len(),
        });
    }
    if n == 0 {
        return Err(QPartError::EmptyWord);
    }
    check_cap(qp.len(), n, cap)?;
    let k = qp.len();
    let weights = match ordering {
        Ordering::Forward => {
            let step = |v: &[C64]| u.apply(v);
            let mut levels = tree_levels(qp, &step, psi, n);
            WeightVector::dense(k, n, levels.pop().expect("n >= 1"))
        }
        Ordering::Reversed => {
            let root = u.apply_power(psi, n as i64 - 1);
            let step = |v: &[C64]| u.apply_inverse(v);
            let mut levels = tree_levels(qp, &step, &root, n);
            WeightVector::dense(k, n, levels.pop().expect("n >= 1")).reversed_labels()
        }
    };
    Ok(RefinedWeights { ordering, weights })
}

/// Forward tables for every depth `1..=n` from one tree traversal.
pub fn forward_weights_by_depth(
    psi: &[C64],
    qp: &QuantumPartition,
    u: &Propagator,
    n: usize,
    cap: u64,
) -> Result<Vec<RefinedWeights>, QPartError> {
    check_inputs(qp, u)?;
    if n == 0 {
        return Err(QPartError::EmptyWord);
    }
    check_cap(qp.len(), n, cap)?;
    let step = |v: &[C64]| u.apply(v);
    Ok(tree_levels(qp, &step, psi, n)
        .into_iter()
        .enumerate()
        .map(|(j, level)| RefinedWeights {
            ordering: Ordering::Forward,
            weights: WeightVector::dense(qp.len(), j + 1, level),
        })
        .collect())
}
