use rand::Rng;

use super::QuantError;
use crate::numkernel::random::random_state;
use crate::numkernel::{norm, C64, ZERO};

/// Tolerance on `|psi| - 1` for vectors used as states.
pub const STATE_NORM_TOL: f64 = 1e-10;

/// Hilbert space of the quantized torus, `C^N` with `hbar = 1 / (2 pi N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantumTorusSpace {
    n: usize,
}

impl QuantumTorusSpace {
    /// `N` must be even and at least 2.
    pub fn new(n: usize) -> Result<Self, QuantError> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(QuantError::OddDimension { n });
        }
        Ok(Self { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn hbar(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI * self.n as f64)
    }

    /// `log(2 pi N) = |log hbar|`.
    pub fn log_inverse_hbar(&self) -> f64 {
        (2.0 * std::f64::consts::PI * self.n as f64).ln()
    }
}

/// Normalized vector of position-basis amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Wraps amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, QuantError> {
        let nrm = norm(&amplitudes);
        if (nrm - 1.0).abs() > STATE_NORM_TOL {
            return Err(QuantError::NotNormalized { norm: nrm });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes any nonzero vector.
    pub fn normalize(amplitudes: Vec<C64>) -> Result<Self, QuantError> {
        let nrm = norm(&amplitudes);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(QuantError::NotNormalized { norm: nrm });
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / nrm).collect(),
        })
    }

    /// Position eigenvector `|k>`.
    pub fn position(space: &QuantumTorusSpace, k: usize) -> Self {
        let mut v = vec![ZERO; space.dim()];
        v[k % space.dim()] = C64::new(1.0, 0.0);
        Self { amplitudes: v }
    }

    pub fn random<R: Rng + ?Sized>(space: &QuantumTorusSpace, rng: &mut R) -> Self {
        Self {
            amplitudes: random_state(space.dim(), rng),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn with_phase(&self, theta: f64) -> Self {
        let ph = C64::from_polar(1.0, theta);
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * ph).collect(),
        }
    }
}
