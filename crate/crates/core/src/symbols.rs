//! Symbol sequences over a K-letter alphabet and weight tables indexed by them.
//!
//! Symbols are 0-based internally. The textual form is 1-based and dot
//! separated, so `[0, 2, 1]` prints as `1.3.2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("symbol {symbol} outside alphabet of size {k}")]
    OutOfAlphabet { symbol: usize, k: usize },
    #[error("cannot parse symbol sequence {0:?}")]
    Parse(String),
    #[error("{k}^{n} sequences exceed the cap of {cap}")]
    CapExceeded { k: usize, n: usize, cap: u64 },
    #[error("weight table shapes differ: ({k1}, {n1}) vs ({k2}, {n2})")]
    ShapeMismatch {
        k1: usize,
        n1: usize,
        k2: usize,
        n2: usize,
    },
    #[error("label {0} has no weight")]
    MissingLabel(String),
}

/// Number of length-`n` words over `k` letters, if it fits in a `u64`.
pub fn sequence_count(k: usize, n: usize) -> Option<u64> {
    (k as u64).checked_pow(u32::try_from(n).ok()?)
}

/// Ensures `k^n <= cap`.
pub fn check_cap(k: usize, n: usize, cap: u64) -> Result<u64, SymbolError> {
    match sequence_count(k, n) {
        Some(c) if c <= cap => Ok(c),
        _ => Err(SymbolError::CapExceeded { k, n, cap }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SymbolSequence(Vec<u16>);

impl SymbolSequence {
    pub fn new(symbols: Vec<usize>) -> Self {
        Self(symbols.into_iter().map(|s| s as u16).collect())
    }

    /// Builds from 1-based symbols, checking them against the alphabet size.
    pub fn from_one_based(symbols: &[usize], k: usize) -> Result<Self, SymbolError> {
        symbols
            .iter()
            .map(|&s| {
                if s == 0 || s > k {
                    Err(SymbolError::OutOfAlphabet { symbol: s, k })
                } else {
                    Ok((s - 1) as u16)
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }

    pub fn symbol(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn symbols(&self) -> impl ExactSizeIterator<Item = usize> + DoubleEndedIterator + '_ {
        self.0.iter().map(|&s| s as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn prefix(&self, len: usize) -> Self {
        Self(self.0[..len].to_vec())
    }

    pub fn suffix(&self, len: usize) -> Self {
        Self(self.0[self.0.len() - len..].to_vec())
    }

    pub fn push(&mut self, symbol: usize) {
        self.0.push(symbol as u16);
    }

    pub fn check_alphabet(&self, k: usize) -> Result<(), SymbolError> {
        match self.symbols().find(|&s| s >= k) {
            Some(s) => Err(SymbolError::OutOfAlphabet { symbol: s + 1, k }),
            None => Ok(()),
        }
    }

    /// Base-`k` code with the first symbol most significant.
    pub fn encode(&self, k: usize) -> u64 {
        self.symbols()
            .fold(0u64, |acc, s| acc * k as u64 + s as u64)
    }

    pub fn decode(mut code: u64, k: usize, n: usize) -> Self {
        let mut v = vec![0u16; n];
        for slot in v.iter_mut().rev() {
            *slot = (code % k as u64) as u16;
            code /= k as u64;
        }
        Self(v)
    }

    /// All words of length `n`, in code order.
    pub fn all(k: usize, n: usize) -> impl Iterator<Item = SymbolSequence> {
        let count = sequence_count(k, n).expect("sequence count overflow");
        (0..count).map(move |c| Self::decode(c, k, n))
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

impl FromStr for SymbolSequence {
    type Err = SymbolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Ok(Self::default());
        }
        s.split('.')
            .map(|t| match t.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok((v - 1) as u16),
                _ => Err(SymbolError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl Serialize for SymbolSequence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SymbolSequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sparse table of nonnegative weights over the words of length `n`.
///
/// Entries are kept sorted by word code; absent words have weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    k: usize,
    n: usize,
    entries: Vec<(u64, f64)>,
}

impl WeightVector {
    /// Dense table in code order.
    pub fn dense(k: usize, n: usize, weights: Vec<f64>) -> Self {
        debug_assert_eq!(Some(weights.len() as u64), sequence_count(k, n));
        Self {
            k,
            n,
            entries: weights
                .into_iter()
                .enumerate()
                .map(|(c, w)| (c as u64, w))
                .collect(),
        }
    }

    /// Sums duplicate codes and sorts.
    pub fn from_entries(k: usize, n: usize, mut entries: Vec<(u64, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut merged: Vec<(u64, f64)> = Vec::with_capacity(entries.len());
        for (c, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += w,
                _ => merged.push((c, w)),
            }
        }
        Self {
            k,
            n,
            entries: merged,
        }
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    /// Number of stored (possibly zero) entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolSequence, f64)> + '_ {
        self.entries
            .iter()
            .map(|&(c, w)| (SymbolSequence::decode(c, self.k, self.n), w))
    }

    pub fn get_code(&self, code: u64) -> f64 {
        match self.entries.binary_search_by_key(&code, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0.0,
        }
    }

    pub fn get(&self, alpha: &SymbolSequence) -> f64 {
        self.get_code(alpha.encode(self.k))
    }

    pub fn total(&self) -> f64 {
        self.values().sum()
    }

    pub fn max(&self) -> f64 {
        self.values().fold(0.0, f64::max)
    }

    /// `self * a + other * b`, entrywise.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self, SymbolError> {
        if self.k != other.k || self.n != other.n {
            return Err(SymbolError::ShapeMismatch {
                k1: self.k,
                n1: self.n,
                k2: other.k,
                n2: other.n,
            });
        }
        let entries = self
            .entries
            .iter()
            .map(|&(c, w)| (c, a * w))
            .chain(other.entries.iter().map(|&(c, w)| (c, b * w)))
            .collect();
        Ok(Self::from_entries(self.k, self.n, entries))
    }

    /// Marginal on the first `m` symbols.
    pub fn prefix_marginal(&self, m: usize) -> Self {
        let drop = sequence_count(self.k, self.n - m).expect("overflow");
        let entries = self.entries.iter().map(|&(c, w)| (c / drop, w)).collect();
        Self::from_entries(self.k, m, entries)
    }

    /// Marginal on the last `m` symbols.
    pub fn suffix_marginal(&self, m: usize) -> Self {
        let keep = sequence_count(self.k, m).expect("overflow");
        let entries = self.entries.iter().map(|&(c, w)| (c % keep, w)).collect();
        Self::from_entries(self.k, m, entries)
    }

    /// Relabels every word by its reversal.
    pub fn reversed_labels(&self) -> Self {
        let entries = self
            .iter()
            .map(|(s, w)| (s.reversed().encode(self.k), w))
            .collect();
        Self::from_entries(self.k, self.n, entries)
    }
}

/// Positive weights `v_alpha` attached to the words of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureWeights {
    k: usize,
    n: usize,
    entries: Vec<(u64, f64)>,
}

impl PressureWeights {
    pub fn uniform(k: usize, n: usize, value: f64) -> Self {
        Self::from_fn(k, n, |_| value)
    }

    pub fn from_fn(k: usize, n: usize, mut f: impl FnMut(&SymbolSequence) -> f64) -> Self {
        let entries = SymbolSequence::all(k, n)
            .enumerate()
            .map(|(c, s)| (c as u64, f(&s)))
            .collect();
        Self { k, n, entries }
    }

    pub fn from_entries(k: usize, n: usize, mut entries: Vec<(u64, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        entries.dedup_by_key(|e| e.0);
        Self { k, n, entries }
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn get_code(&self, code: u64) -> Option<f64> {
        self.entries
            .binary_search_by_key(&code, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn get(&self, alpha: &SymbolSequence) -> Option<f64> {
        self.get_code(alpha.encode(self.k))
    }

    pub fn max(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.1)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            k: self.k,
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|&(code, v)| (code, c * v))
                .collect(),
        }
    }

    /// `max v <= bound^exponent`, the temperedness condition.
    pub fn is_tempered(&self, bound: f64, exponent: f64) -> bool {
        self.max() <= bound.powf(exponent) * (1.0 + 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_is_one_based() {
        let s = SymbolSequence::new(vec![0, 2, 1]);
        assert_eq!(s.to_string(), "1.3.2");
        assert_eq!("1.3.2".parse::<SymbolSequence>().unwrap(), s);
        assert!("0.1".parse::<SymbolSequence>().is_err());
    }

    #[test]
    fn encode_roundtrip() {
        for s in SymbolSequence::all(3, 4) {
            assert_eq!(SymbolSequence::decode(s.encode(3), 3, 4), s);
        }
    }

    #[test]
    fn marginals() {
        let w = WeightVector::dense(2, 2, vec![0.1, 0.2, 0.3, 0.4]);
        let p = w.prefix_marginal(1);
        assert!((p.get_code(0) - 0.3).abs() < 1e-15 && (p.get_code(1) - 0.7).abs() < 1e-15);
        let s = w.suffix_marginal(1);
        assert!((s.get_code(0) - 0.4).abs() < 1e-15 && (s.get_code(1) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn one_based_constructor_checks_range() {
        assert!(SymbolSequence::from_one_based(&[1, 4], 3).is_err());
        assert_eq!(
            SymbolSequence::from_one_based(&[1, 3], 3).unwrap(),
            SymbolSequence::new(vec![0, 2])
        );
    }
}
