use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::space::QuantumTorusSpace;
use super::QuantError;
use crate::classdyn::ToralAutomorphism;
use crate::numkernel::{unitary_eig, ComplexMatrix, SpectralDecomposition, C64};

/// Accepted `max |U†U - I|` for a constructed propagator.
pub const PROPAGATOR_UNITARITY_TOL: f64 = 1e-10;

/// `U_{k',k} = (i N b)^{-1/2} exp(i pi (a k^2 - 2 k k' + d k'^2) / (N b))`, row `k'`, column `k`.
pub fn cat_propagator(
    space: &QuantumTorusSpace,
    a: &ToralAutomorphism,
) -> Result<ComplexMatrix, QuantError> {
    let (ma, mb, _, md) = a.entries();
    if mb == 0 {
        return Err(QuantError::ZeroOffDiagonal);
    }
    let n = space.dim() as i64;
    let nb = n * mb;
    let modulus = 2 * nb.abs();
    let prefactor = C64::new(0.0, nb as f64).sqrt().inv();
    let u = ComplexMatrix::from_fn(space.dim(), space.dim(), |kp, k| {
        let (k, kp) = (k as i64, kp as i64);
        let e = (ma * k * k - 2 * k * kp + md * kp * kp).rem_euclid(modulus);
        prefactor * C64::from_polar(1.0, PI * e as f64 / nb as f64)
    });
    let defect = u.unitarity_defect();
    if defect > PROPAGATOR_UNITARITY_TOL {
        return Err(QuantError::NotUnitary { defect });
    }
    Ok(u)
}

/// Chirp-FFT-chirp factorization available when `|b| = 1`.
#[derive(Clone)]
struct FastKernel {
    prefactor: C64,
    chirp_in: Vec<C64>,
    chirp_out: Vec<C64>,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
    /// `b = 1` uses the forward transform, `b = -1` the backward one.
    sign_positive: bool,
}

/// The quantized automorphism, with its dense matrix and a fast apply path.
#[derive(Clone)]
pub struct Propagator {
    space: QuantumTorusSpace,
    map: ToralAutomorphism,
    matrix: ComplexMatrix,
    fast: Option<FastKernel>,
}

impl fmt::Debug for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Propagator")
            .field("dim", &self.space.dim())
            .field("map", &self.map.matrix())
            .field("fast", &self.fast.is_some())
            .finish()
    }
}

impl Propagator {
    pub fn new(space: &QuantumTorusSpace, map: &ToralAutomorphism) -> Result<Self, QuantError> {
        let matrix = cat_propagator(space, map)?;
        let (ma, mb, _, md) = map.entries();
        let fast = (mb.abs() == 1).then(|| {
            let n = space.dim() as i64;
            let nb = n * mb;
            let modulus = 2 * n;
            let chirp = |coef: i64| -> Vec<C64> {
                (0..n)
                    .map(|k| {
                        C64::from_polar(
                            1.0,
                            PI * (coef * k * k).rem_euclid(modulus) as f64 / nb as f64,
                        )
                    })
                    .collect()
            };
            let mut planner = FftPlanner::new();
            FastKernel {
                prefactor: C64::new(0.0, nb as f64).sqrt().inv(),
                chirp_in: chirp(ma),
                chirp_out: chirp(md),
                forward: planner.plan_fft_forward(space.dim()),
                backward: planner.plan_fft_inverse(space.dim()),
                sign_positive: mb > 0,
            }
        });
        Ok(Self {
            space: *space,
            map: *map,
            matrix,
            fast,
        })
    }

    pub fn space(&self) -> &QuantumTorusSpace {
        &self.space
    }

    pub fn map(&self) -> &ToralAutomorphism {
        &self.map
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `U v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        match &self.fast {
            Some(f) => {
                let mut buf: Vec<C64> = v.iter().zip(&f.chirp_in).map(|(x, c)| x * c).collect();
                if f.sign_positive {
                    f.forward.process(&mut buf);
                } else {
                    f.backward.process(&mut buf);
                }
                buf.iter_mut()
                    .zip(&f.chirp_out)
                    .for_each(|(x, c)| *x *= c * f.prefactor);
                buf
            }
            None => self.matrix.matvec(v),
        }
    }

    /// `U† v`.
    pub fn apply_inverse(&self, v: &[C64]) -> Vec<C64> {
        match &self.fast {
            Some(f) => {
                let pc = f.prefactor.conj();
                let mut buf: Vec<C64> = v
                    .iter()
                    .zip(&f.chirp_out)
                    .map(|(x, c)| x * c.conj())
                    .collect();
                if f.sign_positive {
                    f.backward.process(&mut buf);
                } else {
                    f.forward.process(&mut buf);
                }
                buf.iter_mut()
                    .zip(&f.chirp_in)
                    .for_each(|(x, c)| *x *= c.conj() * pc);
                buf
            }
            None => self.matrix.adjoint_matvec(v),
        }
    }

    /// `U^t v` for any integer `t`.
    pub fn apply_power(&self, v: &[C64], t: i64) -> Vec<C64> {
        let mut out = v.to_vec();
        for _ in 0..t.unsigned_abs() {
            out = if t > 0 {
                self.apply(&out)
            } else {
                self.apply_inverse(&out)
            };
        }
        out
    }

    /// Dense `U^t` for any integer `t`.
    pub fn power(&self, t: i64) -> ComplexMatrix {
        let base = if t >= 0 {
            self.matrix.clone()
        } else {
            self.matrix.adjoint()
        };
        base.pow(t.unsigned_abs() as u32)
    }

    /// Eigendecomposition of `U`, eigenvalues sorted by phase.
    pub fn eigenstates(&self, seed: u64) -> Result<SpectralDecomposition, QuantError> {
        Ok(unitary_eig(&self.matrix, seed)?)
    }
}
