//! Cylinder-set weights `mu(E_alpha)` with
//! `E_alpha = {rho : x(A^i rho) in arc alpha_i, 0 <= i < n}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::automorphism::{wrap_unit, RationalPoint, ToralAutomorphism};
use super::measure::InvariantMeasure;
use super::partition::ArcPartition;
use super::ClassError;
use crate::symbols::{SymbolSequence, WeightVector};

/// Default bound on the number of nonzero cylinders in one table.
pub const DEFAULT_CYLINDER_CAP: u64 = 1 << 23;

/// Strategy for Lebesgue cylinder weights.
pub trait LebesgueWeigher: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Tables for depths `1..=n_max` (entry `i` holds depth `i + 1`), sparse over
    /// nonzero cylinders; errors once the deepest table would exceed `cap` entries.
    fn weights_by_depth(
        &self,
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        n_max: usize,
        cap: u64,
    ) -> Result<Vec<WeightVector>, ClassError>;

    /// Weight of a single cylinder.
    fn cylinder(
        &self,
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        alpha: &SymbolSequence,
    ) -> f64;
}

pub type WeigherFactory = fn() -> Box<dyn LebesgueWeigher>;

/// Named Lebesgue weighers with their default settings.
pub fn weigher_registry() -> BTreeMap<&'static str, WeigherFactory> {
    let mut m: BTreeMap<&'static str, WeigherFactory> = BTreeMap::new();
    m.insert("polygon", || Box::new(PolygonWeigher::default()));
    m.insert("grid", || Box::new(GridWeigher::default()));
    m
}

pub fn lebesgue_weigher(name: &str) -> Result<Box<dyn LebesgueWeigher>, ClassError> {
    weigher_registry()
        .get(name)
        .map(|f| f())
        .ok_or_else(|| ClassError::InvalidArgument(format!("unknown Lebesgue weigher {name:?}")))
}

type Poly = Vec<[f64; 2]>;

/// Exact weights by convex-polygon refinement.
///
/// The forward image `A^{n-1} E_alpha` is kept as a union of convex polygons
/// reduced mod 1 in `x`; one more step maps each polygon by `A` and clips it
/// against the translated strips of every arc. Lebesgue measure is preserved,
/// so polygon areas are the cylinder weights.
#[derive(Debug, Clone)]
pub struct PolygonWeigher {
    /// Pieces and cylinders below this area are dropped as rounding debris.
    pub area_floor: f64,
}

impl Default for PolygonWeigher {
    fn default() -> Self {
        Self { area_floor: 1e-15 }
    }
}

fn shoelace(poly: &Poly) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        let [x0, y0] = poly[i];
        let [x1, y1] = poly[(i + 1) % n];
        s += x0 * y1 - x1 * y0;
    }
    0.5 * s.abs()
}

/// Keeps the part of a convex polygon where `sign * (x - at) >= 0`.
fn clip_x(poly: &Poly, at: f64, sign: f64) -> Poly {
    let mut out = Vec::with_capacity(poly.len() + 2);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let prev = poly[(i + n - 1) % n];
        let fc = sign * (cur[0] - at);
        let fp = sign * (prev[0] - at);
        if fc >= 0.0 {
            if fp < 0.0 {
                out.push(cross(prev, cur, fp, fc, at));
            }
            out.push(cur);
        } else if fp >= 0.0 {
            out.push(cross(prev, cur, fp, fc, at));
        }
    }
    out
}

fn cross(a: [f64; 2], b: [f64; 2], fa: f64, fb: f64, at: f64) -> [f64; 2] {
    let t = fa / (fa - fb);
    [at, a[1] + t * (b[1] - a[1])]
}

impl PolygonWeigher {
    fn roots(&self, partition: &ArcPartition) -> Vec<Vec<Poly>> {
        (0..partition.len())
            .map(|k| {
                let (s, e) = partition.arc(k);
                vec![vec![[s, 0.0], [e, 0.0], [e, 1.0], [s, 1.0]]]
            })
            .collect()
    }

    /// Children of a node, one list of pieces per arc.
    fn refine(
        &self,
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        pieces: &[Poly],
    ) -> Vec<Vec<Poly>> {
        let (ma, mb, mc, md) = a.entries();
        let (ma, mb, mc, md) = (ma as f64, mb as f64, mc as f64, md as f64);
        let k = partition.len();
        let arcs: Vec<(f64, f64)> = (0..k).map(|i| partition.arc(i)).collect();
        let mut children: Vec<Vec<Poly>> = vec![Vec::new(); k];
        for piece in pieces {
            let image: Poly = piece
                .iter()
                .map(|&[x, p]| [ma * x + mb * p, mc * x + md * p])
                .collect();
            let (xmin, xmax) = image
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v[0]), hi.max(v[0]))
                });
            let m_lo = (xmin - arcs[0].0).floor() as i64 - 1;
            let m_hi = (xmax - arcs[0].0).ceil() as i64;
            for m in m_lo..=m_hi {
                let shift = m as f64;
                for (sym, &(s, e)) in arcs.iter().enumerate() {
                    let (lo, hi) = (s + shift, e + shift);
                    if hi <= xmin || lo >= xmax {
                        continue;
                    }
                    let mut clipped = if lo > xmin {
                        clip_x(&image, lo, 1.0)
                    } else {
                        image.clone()
                    };
                    if hi < xmax {
                        clipped = clip_x(&clipped, hi, -1.0);
                    }
                    if clipped.len() < 3 || shoelace(&clipped) <= self.area_floor {
                        continue;
                    }
                    let pmin = clipped.iter().fold(f64::INFINITY, |acc, v| acc.min(v[1]));
                    let dp = pmin.floor();
                    for v in clipped.iter_mut() {
                        v[0] -= shift;
                        v[1] -= dp;
                    }
                    children[sym].push(clipped);
                }
            }
        }
        children
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        pieces: Vec<Poly>,
        code: u64,
        depth: usize,
        n_max: usize,
        budget: &Budget,
    ) -> Vec<Vec<(u64, f64)>> {
        let k = partition.len() as u64;
        let mut out: Vec<Vec<(u64, f64)>> = vec![Vec::new(); n_max];
        if depth == n_max || budget.exhausted() {
            return out;
        }
        let children = self.refine(a, partition, &pieces);
        drop(pieces);
        let live: Vec<(u64, Vec<Poly>)> = children
            .into_iter()
            .enumerate()
            .filter_map(|(sym, ch)| {
                let w: f64 = ch.iter().map(shoelace).sum();
                (w > self.area_floor).then_some((code * k + sym as u64, ch))
            })
            .collect();
        for (c, ch) in &live {
            out[depth].push((*c, ch.iter().map(shoelace).sum()));
        }
        if depth + 1 == n_max {
            budget.spend(live.len() as u64);
        }
        let deeper =
            |(c, ch): (u64, Vec<Poly>)| self.descend(a, partition, ch, c, depth + 1, n_max, budget);
        let sub: Vec<Vec<Vec<(u64, f64)>>> = if depth < 3 {
            live.into_par_iter().map(deeper).collect()
        } else {
            live.into_iter().map(deeper).collect()
        };
        for s in sub {
            for (level, entries) in s.into_iter().enumerate() {
                out[level].extend(entries);
            }
        }
        out
    }
}

struct Budget {
    used: AtomicU64,
    cap: u64,
    over: AtomicBool,
}

impl Budget {
    fn spend(&self, n: u64) {
        if self.used.fetch_add(n, Ordering::Relaxed) + n > self.cap {
            self.over.store(true, Ordering::Relaxed);
        }
    }

    fn exhausted(&self) -> bool {
        self.over.load(Ordering::Relaxed)
    }
}

impl LebesgueWeigher for PolygonWeigher {
    fn name(&self) -> &'static str {
        "polygon"
    }

    fn weights_by_depth(
        &self,
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        n_max: usize,
        cap: u64,
    ) -> Result<Vec<WeightVector>, ClassError> {
        let k = partition.len();
        if n_max == 0 {
            return Ok(Vec::new());
        }
        let budget = Budget {
            used: AtomicU64::new(0),
            cap,
            over: AtomicBool::new(false),
        };
        let mut levels: Vec<Vec<(u64, f64)>> = vec![Vec::new(); n_max];
        let roots = self.roots(partition);
        levels[0] = (0..k)
            .map(|s| (s as u64, partition.arc_length(s)))
            .collect();
        if n_max == 1 {
            budget.spend(k as u64);
        }
        let sub: Vec<_> = roots
            .into_par_iter()
            .enumerate()
            .map(|(s, pieces)| self.descend(a, partition, pieces, s as u64, 1, n_max, &budget))
            .collect();
        if budget.exhausted() {
            return Err(ClassError::CapExceeded { cap });
        }
        for s in sub {
            for (level, entries) in s.into_iter().enumerate() {
                levels[level].extend(entries);
            }
        }
        Ok(levels
            .into_iter()
            .enumerate()
            .map(|(i, e)| WeightVector::from_entries(k, i + 1, e))
            .collect())
    }

    fn cylinder(
        &self,
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        alpha: &SymbolSequence,
    ) -> f64 {
        if alpha.is_empty() {
            return 1.0;
        }
        let mut pieces = self.roots(partition).swap_remove(alpha.symbol(0));
        for sym in alpha.symbols().skip(1) {
            pieces = self.refine(a, partition, &pieces).swap_remove(sym);
            if pieces.is_empty() {
                return 0.0;
            }
        }
        pieces.iter().map(shoelace).sum()
    }
}

/// Stratified sampling on a jittered `side x side` grid.
///
/// Each grid cell contributes one point displaced uniformly inside the cell;
/// the jitter of row `i` comes from its own generator seeded by `(seed, i)`,
/// so results do not depend on thread scheduling. The error of a single
/// weight is of order `1 / side`.
#[derive(Debug, Clone)]
pub struct GridWeigher {
    pub side: usize,
    pub seed: u64,
}

impl Default for GridWeigher {
    fn default() -> Self {
        Self { side: 512, seed: 1 }
    }
}

impl GridWeigher {
    fn row_points(&self, row: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let g = self.side as f64;
        let mut rng =
            ChaCha8Rng::seed_from_u64(self.seed ^ (row as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        (0..self.side).map(move |col| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            ((row as f64 + u) / g, (col as f64 + v) / g)
        })
    }

    /// Itinerary codes of one point for depths `1..=n`.
    fn codes(
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        mut x: f64,
        mut p: f64,
        n: usize,
    ) -> Vec<u64> {
        let (ma, mb, mc, md) = a.entries();
        let k = partition.len() as u64;
        let mut code = 0u64;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            code = code * k + partition.arc_of(x) as u64;
            out.push(code);
            let nx = wrap_unit(ma as f64 * x + mb as f64 * p);
            let np = wrap_unit(mc as f64 * x + md as f64 * p);
            x = nx;
            p = np;
        }
        out
    }
}

impl LebesgueWeigher for GridWeigher {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn weights_by_depth(
        &self,
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        n_max: usize,
        cap: u64,
    ) -> Result<Vec<WeightVector>, ClassError> {
        let k = partition.len();
        let per_row: Vec<Vec<Vec<u64>>> = (0..self.side)
            .into_par_iter()
            .map(|row| {
                let mut levels = vec![Vec::with_capacity(self.side); n_max];
                for (x, p) in self.row_points(row) {
                    for (lvl, c) in Self::codes(a, partition, x, p, n_max)
                        .into_iter()
                        .enumerate()
                    {
                        levels[lvl].push(c);
                    }
                }
                levels
            })
            .collect();
        let mass = 1.0 / (self.side * self.side) as f64;
        let mut out = Vec::with_capacity(n_max);
        for lvl in 0..n_max {
            let entries: Vec<(u64, f64)> = per_row
                .iter()
                .flat_map(|r| r[lvl].iter().map(|&c| (c, mass)))
                .collect();
            let table = WeightVector::from_entries(k, lvl + 1, entries);
            if table.len() as u64 > cap {
                return Err(ClassError::CapExceeded { cap });
            }
            out.push(table);
        }
        Ok(out)
    }

    fn cylinder(
        &self,
        a: &ToralAutomorphism,
        partition: &ArcPartition,
        alpha: &SymbolSequence,
    ) -> f64 {
        let n = alpha.len();
        if n == 0 {
            return 1.0;
        }
        let target = alpha.encode(partition.len());
        let hits: usize = (0..self.side)
            .into_par_iter()
            .map(|row| {
                self.row_points(row)
                    .filter(|&(x, p)| Self::codes(a, partition, x, p, n)[n - 1] == target)
                    .count()
            })
            .sum();
        hits as f64 / (self.side * self.side) as f64
    }
}

/// Itinerary code of a rational point for depths `1..=n`.
fn atom_codes(
    a: &ToralAutomorphism,
    partition: &ArcPartition,
    mut pt: RationalPoint,
    n: usize,
) -> Vec<u64> {
    let k = partition.len() as u64;
    let mut code = 0u64;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        code = code * k + partition.arc_of_rational(pt.x, pt.q) as u64;
        out.push(code);
        pt = a.apply_rational(pt);
    }
    out
}

/// Weight tables of `mu` for depths `1..=n_max`; entry `i` holds depth `i + 1`.
pub fn cylinder_weights_by_depth(
    mu: &InvariantMeasure,
    a: &ToralAutomorphism,
    partition: &ArcPartition,
    n_max: usize,
    weigher: &dyn LebesgueWeigher,
    cap: u64,
) -> Result<Vec<WeightVector>, ClassError> {
    mu.validate(a)?;
    let k = partition.len();
    let mut levels: Vec<Vec<(u64, f64)>> = vec![Vec::new(); n_max];
    let leb = mu.lebesgue_mass();
    if leb > 0.0 {
        for (lvl, table) in weigher
            .weights_by_depth(a, partition, n_max, cap)?
            .into_iter()
            .enumerate()
        {
            levels[lvl].extend(table.entries().iter().map(|&(c, w)| (c, leb * w)));
        }
    }
    for (pt, mass) in mu.atoms() {
        for (lvl, c) in atom_codes(a, partition, pt, n_max).into_iter().enumerate() {
            levels[lvl].push((c, mass));
        }
    }
    let tables: Vec<WeightVector> = levels
        .into_iter()
        .enumerate()
        .map(|(i, e)| WeightVector::from_entries(k, i + 1, e))
        .collect();
    if let Some(last) = tables.last() {
        if last.len() as u64 > cap {
            return Err(ClassError::CapExceeded { cap });
        }
    }
    Ok(tables)
}

/// Weight table of `mu` at depth `n`.
pub fn cylinder_weights(
    mu: &InvariantMeasure,
    a: &ToralAutomorphism,
    partition: &ArcPartition,
    n: usize,
    weigher: &dyn LebesgueWeigher,
) -> Result<WeightVector, ClassError> {
    if n == 0 {
        return Ok(WeightVector::dense(partition.len(), 0, vec![1.0]));
    }
    let mut all = cylinder_weights_by_depth(mu, a, partition, n, weigher, DEFAULT_CYLINDER_CAP)?;
    Ok(all.pop().expect("n >= 1"))
}

/// `mu(E_alpha)`: exact for atoms, delegated to `weigher` for the Lebesgue part.
pub fn cylinder_weight(
    mu: &InvariantMeasure,
    a: &ToralAutomorphism,
    partition: &ArcPartition,
    alpha: &SymbolSequence,
    weigher: &dyn LebesgueWeigher,
) -> Result<f64, ClassError> {
    mu.validate(a)?;
    alpha
        .check_alphabet(partition.len())
        .map_err(|e| ClassError::InvalidArgument(e.to_string()))?;
    let n = alpha.len();
    let mut w = 0.0;
    let leb = mu.lebesgue_mass();
    if leb > 0.0 {
        w += leb * weigher.cylinder(a, partition, alpha);
    }
    if n > 0 {
        let target = alpha.encode(partition.len());
        for (pt, mass) in mu.atoms() {
            if atom_codes(a, partition, pt, n)[n - 1] == target {
                w += mass;
            }
        }
    } else {
        w = 1.0;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_square() {
        let sq: Poly = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let left = clip_x(&sq, 0.25, -1.0);
        assert!((shoelace(&left) - 0.25).abs() < 1e-15);
        let right = clip_x(&sq, 0.25, 1.0);
        assert!((shoelace(&right) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn registry_names() {
        let names: Vec<_> = weigher_registry().keys().copied().collect();
        assert_eq!(names, vec!["grid", "polygon"]);
        assert!(lebesgue_weigher("nope").is_err());
        assert_eq!(lebesgue_weigher("polygon").unwrap().name(), "polygon");
    }
}
