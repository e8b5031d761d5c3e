use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::space::QuantumTorusSpace;
use crate::classdyn::ToralAutomorphism;
use crate::numkernel::{ComplexMatrix, C64, ZERO};

/// Phase-space translation `T(n, m)` in the position basis:
/// `T(n, m)|k> = e^{i pi n m / N} e^{2 pi i n (k - m) / N} |k - m mod N>`.
///
/// It is monomial, so it is stored as the map `k -> (row, phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeylTranslation {
    pub n: i64,
    pub m: i64,
    dim: usize,
}

impl WeylTranslation {
    pub fn new(space: &QuantumTorusSpace, n: i64, m: i64) -> Self {
        Self {
            n,
            m,
            dim: space.dim(),
        }
    }

    /// Row index and matrix entry of column `k`.
    #[inline]
    pub fn column(&self, k: usize) -> (usize, C64) {
        let nn = self.dim as i64;
        let j = (k as i64 - self.m).rem_euclid(nn);
        // Exponent in units of pi / N, reduced mod 2N so it stays exact.
        let e = ((self.n.rem_euclid(2 * nn)) * (self.m.rem_euclid(2 * nn))
            + 2 * self.n.rem_euclid(nn) * j)
            .rem_euclid(2 * nn);
        (j as usize, C64::from_polar(1.0, PI * e as f64 / nn as f64))
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(self.dim, self.dim);
        for k in 0..self.dim {
            let (j, ph) = self.column(k);
            t[(j, k)] = ph;
        }
        t
    }

    /// `T v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        for (k, &x) in v.iter().enumerate() {
            let (j, ph) = self.column(k);
            out[j] = ph * x;
        }
        out
    }

    /// `acc += c T M` without forming `T`.
    pub fn add_left_product(&self, c: C64, m: &ComplexMatrix, acc: &mut ComplexMatrix) {
        let cols = m.cols();
        for k in 0..self.dim {
            let (j, ph) = self.column(k);
            let f = c * ph;
            let src = m.row(k);
            let dst = &mut acc.as_mut_slice()[j * cols..(j + 1) * cols];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += f * s;
            }
        }
    }

    /// `acc += c M T` without forming `T`.
    pub fn add_right_product(&self, c: C64, m: &ComplexMatrix, acc: &mut ComplexMatrix) {
        let rows = m.rows();
        for k in 0..self.dim {
            let (j, ph) = self.column(k);
            let f = c * ph;
            for i in 0..rows {
                acc[(i, k)] += f * m[(i, j)];
            }
        }
    }
}

/// Dense matrix of `T(n, m)`.
pub fn weyl_translation(space: &QuantumTorusSpace, n: i64, m: i64) -> ComplexMatrix {
    WeylTranslation::new(space, n, m).to_matrix()
}

/// Trigonometric polynomial `a(x, p) = sum c_{n,m} e^{2 pi i (n x + m p)}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Observable {
    coeffs: BTreeMap<(i64, i64), C64>,
}

impl Observable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::new().with((0, 0), C64::new(c, 0.0))
    }

    /// `e^{2 pi i (n x + m p)}`.
    pub fn fourier_mode(n: i64, m: i64) -> Self {
        Self::new().with((n, m), C64::new(1.0, 0.0))
    }

    /// `cos(2 pi (n x + m p))`.
    pub fn cosine(n: i64, m: i64) -> Self {
        let half = C64::new(0.5, 0.0);
        Self::new().with((n, m), half).with((-n, -m), half)
    }

    pub fn with(mut self, index: (i64, i64), c: C64) -> Self {
        *self.coeffs.entry(index).or_insert(ZERO) += c;
        self
    }

    pub fn coefficients(&self) -> &BTreeMap<(i64, i64), C64> {
        &self.coeffs
    }

    /// True if `c_{-n,-m} = conj(c_{n,m})` to `tol`, i.e. `a` is real valued.
    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|(&(n, m), c)| {
            let partner = self.coeffs.get(&(-n, -m)).copied().unwrap_or(ZERO);
            (partner - c.conj()).norm() <= tol
        })
    }

    /// Complex conjugate function.
    pub fn conj(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(n, m), c)| ((-n, -m), c.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&k, c)| (k, c * s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, &c) in &other.coeffs {
            out = out.with(k, c);
        }
        out
    }

    /// `a o A^t`; the frequency `k` moves to `(A^t)^T k`.
    pub fn compose(&self, a: &ToralAutomorphism, t: i64) -> Self {
        let at = a.power(t);
        let mut out = Self::new();
        for (&k, &c) in &self.coeffs {
            out = out.with(at.transpose_apply(k), c);
        }
        out
    }

    pub fn evaluate(&self, x: f64, p: f64) -> C64 {
        self.coeffs
            .iter()
            .map(|(&(n, m), c)| c * C64::from_polar(1.0, 2.0 * PI * (n as f64 * x + m as f64 * p)))
            .sum()
    }

    pub fn translations(&self, space: &QuantumTorusSpace) -> Vec<(C64, WeylTranslation)> {
        self.coeffs
            .iter()
            .map(|(&(n, m), &c)| (c, WeylTranslation::new(space, n, m)))
            .collect()
    }
}

/// `Op_N(a) = sum c_{n,m} T(n, m)`.
pub fn quantize_observable(space: &QuantumTorusSpace, a: &Observable) -> ComplexMatrix {
    let n = space.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (c, t) in a.translations(space) {
        for k in 0..n {
            let (j, ph) = t.column(k);
            out[(j, k)] += c * ph;
        }
    }
    out
}

/// `Op_N(a) v` without forming the matrix.
pub fn apply_observable(space: &QuantumTorusSpace, a: &Observable, v: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; space.dim()];
    for (c, t) in a.translations(space) {
        for (k, &x) in v.iter().enumerate() {
            let (j, ph) = t.column(k);
            out[j] += c * ph * x;
        }
    }
    out
}
