use super::smooth::SmoothPartition;
use super::QPartError;
use crate::numkernel::{ComplexMatrix, C64};
use crate::quantization::QuantumTorusSpace;

/// Multiplication operators `P_k = diag(f_k(j / N))` with `sum P_k^2 = Id`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPartition {
    diagonals: Vec<Vec<f64>>,
}

/// Accepted `max |sum_k P_k^2 - Id|`.
pub const PARTITION_IDENTITY_TOL: f64 = 1e-12;

impl QuantumPartition {
    pub fn from_smooth(space: &QuantumTorusSpace, sp: &SmoothPartition) -> Self {
        Self {
            diagonals: sp.sample(space.dim()),
        }
    }

    /// Arbitrary nonnegative diagonals, checked for the resolution of identity.
    pub fn from_diagonals(diagonals: Vec<Vec<f64>>) -> Result<Self, QPartError> {
        if diagonals.is_empty() || diagonals.iter().any(|d| d.len() != diagonals[0].len()) {
            return Err(QPartError::InvalidPartition(
                "diagonals must be nonempty with equal lengths".into(),
            ));
        }
        let qp = Self { diagonals };
        let defect = qp.identity_defect();
        if defect > PARTITION_IDENTITY_TOL {
            return Err(QPartError::InvalidPartition(format!(
                "sum of squares deviates from 1 by {defect:.3e}"
            )));
        }
        Ok(qp)
    }

    pub fn len(&self) -> usize {
        self.diagonals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonals.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.diagonals[0].len()
    }

    pub fn diagonal(&self, k: usize) -> &[f64] {
        &self.diagonals[k]
    }

    pub fn operator(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&self.diagonals[k])
    }

    /// `P_k v`.
    pub fn apply(&self, k: usize, v: &[C64]) -> Vec<C64> {
        v.iter()
            .zip(&self.diagonals[k])
            .map(|(z, &f)| z * f)
            .collect()
    }

    /// `P_k M`.
    pub fn apply_left(&self, k: usize, m: &ComplexMatrix) -> ComplexMatrix {
        m.scale_rows(&self.diagonals[k])
    }

    /// `max_j |sum_k f_k(j)^2 - 1|`.
    pub fn identity_defect(&self) -> f64 {
        (0..self.dim())
            .map(|j| (self.diagonals.iter().map(|d| d[j] * d[j]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
