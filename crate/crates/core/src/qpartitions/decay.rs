use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use super::partition::QuantumPartition;
use super::QPartError;
use crate::classdyn::ToralAutomorphism;
use crate::numkernel::{norm, operator_norm_exact, ComplexMatrix, C64};
use crate::quantization::{Propagator, QuantumTorusSpace};

/// Default `delta'` in the Ehrenfest time.
pub const DEFAULT_EHRENFEST_DELTA: f64 = 0.05;
/// Number of nodes kept per level by the beam search seeding the bounds.
const BEAM_WIDTH: usize = 64;

/// `n_E = floor((1 - delta') log(2 pi N) / log lambda_+)`.
pub fn ehrenfest_time(space: &QuantumTorusSpace, map: &ToralAutomorphism, delta: f64) -> usize {
    ((1.0 - delta) * space.log_inverse_hbar() / map.log_lambda())
        .floor()
        .max(0.0) as usize
}

/// `n_1 = log(2 pi N) / log lambda_+`.
pub fn ehrenfest_n1(space: &QuantumTorusSpace, map: &ToralAutomorphism) -> f64 {
    space.log_inverse_hbar() / map.log_lambda()
}

struct SharedMax(Vec<AtomicU64>);

impl SharedMax {
    fn new(init: &[f64]) -> Self {
        Self(init.iter().map(|v| AtomicU64::new(v.to_bits())).collect())
    }

    fn get(&self, d: usize) -> f64 {
        f64::from_bits(self.0[d].load(AtomicOrdering::Relaxed))
    }

    fn raise(&self, d: usize, v: f64) {
        // Nonnegative floats order like their bit patterns.
        self.0[d].fetch_max(v.to_bits(), AtomicOrdering::Relaxed);
    }

    fn into_vec(self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .0
            .into_iter()
            .map(|a| f64::from_bits(a.into_inner()))
            .collect();
        for d in (0..out.len().saturating_sub(1)).rev() {
            out[d] = out[d].max(out[d + 1]);
        }
        out
    }
}

/// Generic exact maximization over the word tree.
///
/// `expand(node, s)` returns the child for symbol `s` with its score; scores
/// never increase along a branch, which makes `score <= best[n_max]` a valid cut.
fn branch_and_bound<T, E>(k: usize, roots: Vec<(T, f64)>, n_max: usize, expand: &E) -> Vec<f64>
where
    T: Send + Sync,
    E: Fn(&T, usize) -> (T, f64) + Sync,
{
    // Beam search for initial lower bounds.
    let mut init = vec![0.0; n_max];
    {
        let mut beam: Vec<(usize, f64)> = (0..roots.len()).map(|i| (i, roots[i].1)).collect();
        let mut beam_nodes: Vec<&T> = roots.iter().map(|r| &r.0).collect();
        let mut owned: Vec<T>;
        init[0] = roots.iter().map(|r| r.1).fold(0.0, f64::max);
        for slot in init.iter_mut().skip(1) {
            let mut children: Vec<(T, f64)> = beam
                .par_iter()
                .flat_map_iter(|&(i, _)| (0..k).map(move |s| (i, s)))
                .map(|(i, s)| expand(beam_nodes[i], s))
                .collect();
            children.sort_by(|a, b| b.1.total_cmp(&a.1));
            children.truncate(BEAM_WIDTH);
            *slot = children.first().map_or(0.0, |c| c.1);
            beam = (0..children.len()).map(|i| (i, children[i].1)).collect();
            owned = children.into_iter().map(|c| c.0).collect();
            beam_nodes = owned.iter().collect();
        }
    }
    let best = SharedMax::new(&init);
    let cut = n_max - 1;
    // Split the tree into enough independent subtrees to keep every thread busy.
    let mut frontier: Vec<(T, f64, usize)> = roots.into_iter().map(|(t, s)| (t, s, 0)).collect();
    let mut expanded = true;
    while expanded && frontier.len() < 256 {
        expanded = false;
        let mut next = Vec::with_capacity(frontier.len() * k);
        for (node, score, depth) in frontier {
            best.raise(depth, score);
            if depth + 1 >= n_max || score <= best.get(cut) {
                next.push((node, score, depth));
                continue;
            }
            expanded = true;
            for s in 0..k {
                let (child, cs) = expand(&node, s);
                next.push((child, cs, depth + 1));
            }
        }
        frontier = next;
    }
    frontier.par_iter().for_each(|(node, score, depth)| {
        dfs(k, node, *score, *depth, n_max, expand, &best);
    });
    best.into_vec()
}

fn dfs<T, E>(
    k: usize,
    node: &T,
    score: f64,
    depth: usize,
    n_max: usize,
    expand: &E,
    best: &SharedMax,
) where
    E: Fn(&T, usize) -> (T, f64) + Sync,
{
    best.raise(depth, score);
    if depth + 1 >= n_max || score <= best.get(n_max - 1) {
        return;
    }
    let mut children: Vec<(T, f64)> = (0..k).map(|s| expand(node, s)).collect();
    children.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (child, cs) in children {
        dfs(k, &child, cs, depth + 1, n_max, expand, best);
    }
}

/// `max_{|a| = n} |P_a psi|` for `n = 1..=n_max`, computed exactly by branch and bound.
pub fn max_norm_profile(
    psi: &[C64],
    qp: &QuantumPartition,
    u: &Propagator,
    n_max: usize,
) -> Result<Vec<f64>, QPartError> {
    if qp.dim() != u.dim() || psi.len() != u.dim() {
        return Err(QPartError::Dimension {
            expected: u.dim(),
            found: psi.len().min(qp.dim()),
        });
    }
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let roots: Vec<(Vec<C64>, f64)> = (0..qp.len())
        .map(|s| {
            let v = qp.apply(s, psi);
            let r = norm(&v);
            (v, r)
        })
        .collect();
    let expand = |phi: &Vec<C64>, s: usize| {
        let v = qp.apply(s, &u.apply(phi));
        let r = norm(&v);
        (v, r)
    };
    Ok(branch_and_bound(qp.len(), roots, n_max, &expand))
}

/// `max_{|a| = n} |P_a|` (operator norm) for `n = 1..=n_max`.
///
/// Uses dense matrices, so it is meant for moderate `N`.
pub fn max_operator_norm_profile(
    qp: &QuantumPartition,
    u: &Propagator,
    n_max: usize,
) -> Result<Vec<f64>, QPartError> {
    if qp.dim() != u.dim() {
        return Err(QPartError::Dimension {
            expected: u.dim(),
            found: qp.dim(),
        });
    }
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let roots: Vec<(ComplexMatrix, f64)> = (0..qp.len())
        .map(|s| {
            let m = qp.operator(s);
            let r = qp.diagonal(s).iter().fold(0.0f64, |a, v| a.max(v.abs()));
            (m, r)
        })
        .collect();
    let matrix = u.matrix();
    let expand = |m: &ComplexMatrix, s: usize| {
        let child = qp.apply_left(s, &matrix.matmul(m));
        let r = operator_norm_exact(&child);
        (child, r)
    };
    Ok(branch_and_bound(qp.len(), roots, n_max, &expand))
}

/// Least-squares decay rate `gamma` of `values[n - 1] ~ C e^{-gamma n}` over `n in [lo, hi]`.
pub fn fit_decay_rate(values: &[f64], lo: usize, hi: usize) -> Option<f64> {
    let points: Vec<(f64, f64)> = (lo.max(1)..=hi.min(values.len()))
        .filter(|&n| values[n - 1] > 0.0)
        .map(|n| (n as f64, values[n - 1].ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}
