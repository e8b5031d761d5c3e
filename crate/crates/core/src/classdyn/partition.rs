use super::ClassError;

/// Partition of the position circle into `K` half-open arcs `[c_k, c_{k+1})`,
/// the last arc wrapping through 0. Each arc lifts to a vertical strip of the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcPartition {
    cuts: Vec<f64>,
    uniform: bool,
}

impl ArcPartition {
    /// `K` equal arcs starting at 0.
    pub fn uniform(k: usize) -> Result<Self, ClassError> {
        if k == 0 {
            return Err(ClassError::InvalidPartition(
                "at least one arc is required".into(),
            ));
        }
        Ok(Self {
            cuts: (0..k).map(|i| i as f64 / k as f64).collect(),
            uniform: true,
        })
    }

    /// Arbitrary cut points in `[0, 1)`, strictly increasing.
    pub fn with_cuts(cuts: Vec<f64>) -> Result<Self, ClassError> {
        if cuts.is_empty() {
            return Err(ClassError::InvalidPartition(
                "at least one cut is required".into(),
            ));
        }
        if cuts.iter().any(|c| !(0.0..1.0).contains(c)) {
            return Err(ClassError::InvalidPartition(
                "cuts must lie in [0, 1)".into(),
            ));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ClassError::InvalidPartition(
                "cuts must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            cuts,
            uniform: false,
        })
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    /// Arc `k` as `[start, end)` with `end` possibly above 1 for the wrapping arc.
    pub fn arc(&self, k: usize) -> (f64, f64) {
        let start = self.cuts[k];
        let end = if k + 1 < self.cuts.len() {
            self.cuts[k + 1]
        } else {
            self.cuts[0] + 1.0
        };
        (start, end)
    }

    pub fn arc_length(&self, k: usize) -> f64 {
        let (s, e) = self.arc(k);
        e - s
    }

    /// Largest arc length.
    pub fn diameter(&self) -> f64 {
        (0..self.len())
            .map(|k| self.arc_length(k))
            .fold(0.0, f64::max)
    }

    /// Index of the arc containing position `x` (taken mod 1).
    pub fn arc_of(&self, x: f64) -> usize {
        let x = x.rem_euclid(1.0);
        let k = self.cuts.partition_point(|&c| c <= x);
        if k == 0 {
            self.cuts.len() - 1
        } else {
            k - 1
        }
    }

    /// Arc of the rational position `num / den`, exact for uniform partitions.
    pub fn arc_of_rational(&self, num: u64, den: u64) -> usize {
        if self.uniform {
            let k = self.cuts.len() as u128;
            ((num as u128 % den as u128) * k / den as u128) as usize
        } else {
            self.arc_of(num as f64 / den as f64)
        }
    }

    pub fn contains(&self, k: usize, x: f64) -> bool {
        self.arc_of(x) == k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_lookup() {
        let p = ArcPartition::uniform(4).unwrap();
        assert_eq!(p.arc_of(0.0), 0);
        assert_eq!(p.arc_of(0.25), 1);
        assert_eq!(p.arc_of(0.999), 3);
        assert_eq!(p.arc_of(-0.1), 3);
        assert_eq!(p.arc_of_rational(3, 12), 1);
        assert!((p.diameter() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn wrapping_arc() {
        let p = ArcPartition::with_cuts(vec![0.1, 0.6]).unwrap();
        assert_eq!(p.arc_of(0.05), 1);
        assert_eq!(p.arc_of(0.95), 1);
        assert_eq!(p.arc_of(0.3), 0);
        assert!((p.arc_length(1) - 0.5).abs() < 1e-15);
        assert!(ArcPartition::with_cuts(vec![0.5, 0.2]).is_err());
    }
}
