use std::f64::consts::FRAC_PI_2;

use super::QPartError;

/// `C^infinity` step from 0 (at `s <= 0`) to 1 (at `s >= 1`).
fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

/// Smoothed partition of the position circle into `K` equal arcs with
/// `sum_k f_k(x)^2 = 1`.
///
/// Around each cut, the outgoing arc falls as `cos(pi/2 * S)` and the incoming
/// one rises as `sin(pi/2 * S)`, `S` being a smooth step across a window of
/// length `width` centered on the cut. Every `f_k` is supported in its arc
/// widened by `width / 2` on each side. Values are finally divided by the
/// pointwise root of the sum of squares, which makes the identity hold to
/// rounding. `width = 0` gives the indicators of the half-open arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPartition {
    k: usize,
    epsilon: f64,
    width: f64,
}

impl SmoothPartition {
    pub fn new(k: usize, epsilon: f64, width: f64) -> Result<Self, QPartError> {
        if k == 0 {
            return Err(QPartError::InvalidPartition(
                "at least one arc is required".into(),
            ));
        }
        let arc = 1.0 / k as f64;
        if arc > epsilon * (1.0 + 1e-12) {
            return Err(QPartError::InvalidPartition(format!(
                "arc length 1/{k} exceeds the diameter bound {epsilon}"
            )));
        }
        if width.is_nan() || width < 0.0 || (k > 1 && width >= 0.5 * arc) {
            return Err(QPartError::InvalidPartition(format!(
                "smoothing width {width} must be nonnegative and below half the arc length {}",
                0.5 * arc
            )));
        }
        Ok(Self { k, epsilon, width })
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Support of `f_k` as `[start, end]`, possibly extending outside `[0, 1]`.
    pub fn support(&self, k: usize) -> (f64, f64) {
        if self.k == 1 {
            return (0.0, 1.0);
        }
        let arc = 1.0 / self.k as f64;
        (
            k as f64 * arc - 0.5 * self.width,
            (k + 1) as f64 * arc + 0.5 * self.width,
        )
    }

    /// Length of the support of each `f_k`.
    pub fn support_diameter(&self) -> f64 {
        if self.k == 1 {
            1.0
        } else {
            1.0 / self.k as f64 + self.width
        }
    }

    /// Unnormalized profile of arc `k` at `x`.
    fn raw(&self, k: usize, x: f64) -> f64 {
        let arc = 1.0 / self.k as f64;
        let start = k as f64 * arc;
        // Offset of x from the arc start, wrapped into [-1/2, 1/2) around the arc center.
        let center = start + 0.5 * arc;
        let d = (x - center + 0.5).rem_euclid(1.0) - 0.5;
        let from_start = d + 0.5 * arc;
        let to_end = 0.5 * arc - d;
        if self.width == 0.0 {
            return if from_start >= 0.0 && to_end > 0.0 {
                1.0
            } else {
                0.0
            };
        }
        let w = self.width;
        if from_start <= -0.5 * w || to_end <= -0.5 * w {
            0.0
        } else if from_start < 0.5 * w {
            let s = (from_start + 0.5 * w) / w;
            (FRAC_PI_2 * smooth_step(s)).sin()
        } else if to_end < 0.5 * w {
            let s = (0.5 * w - to_end) / w;
            (FRAC_PI_2 * smooth_step(s)).cos()
        } else {
            1.0
        }
    }

    /// All `K` values at `x`.
    pub fn values(&self, x: f64) -> Vec<f64> {
        if self.k == 1 {
            return vec![1.0];
        }
        let raw: Vec<f64> = (0..self.k).map(|k| self.raw(k, x)).collect();
        let total = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        raw.into_iter().map(|v| v / total).collect()
    }

    pub fn evaluate(&self, k: usize, x: f64) -> f64 {
        self.values(x)[k]
    }

    /// `K x N` table of `f_k(j / N)`.
    pub fn sample(&self, n: usize) -> Vec<Vec<f64>> {
        let mut table = vec![vec![0.0; n]; self.k];
        for j in 0..n {
            for (row, v) in table.iter_mut().zip(self.values(j as f64 / n as f64)) {
                row[j] = v;
            }
        }
        table
    }
}
