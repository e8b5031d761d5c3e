use serde::{Deserialize, Serialize};

use super::ClassError;

/// A point of the torus `(R/Z)^2` with position `x` and momentum `p` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: f64,
    pub p: f64,
}

impl TorusPoint {
    pub fn new(x: f64, p: f64) -> Self {
        Self {
            x: wrap_unit(x),
            p: wrap_unit(p),
        }
    }

    /// Distance on the torus (sup norm of the shortest representative).
    pub fn distance(&self, other: &Self) -> f64 {
        let d = |a: f64, b: f64| {
            let t = (a - b).rem_euclid(1.0);
            t.min(1.0 - t)
        };
        d(self.x, other.x).max(d(self.p, other.p))
    }
}

/// Reduces mod 1 into `[0, 1)`, guarding the `-tiny -> 1.0` rounding case.
pub fn wrap_unit(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A torus point with coordinates in `(1/q) Z`, iterated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RationalPoint {
    pub x: u64,
    pub p: u64,
    pub q: u64,
}

impl RationalPoint {
    pub fn new(x: i64, p: i64, q: u64) -> Self {
        assert!(q >= 1, "denominator must be positive");
        let qi = q as i64;
        Self {
            x: x.rem_euclid(qi) as u64,
            p: p.rem_euclid(qi) as u64,
            q,
        }
    }

    pub fn to_point(self) -> TorusPoint {
        TorusPoint::new(self.x as f64 / self.q as f64, self.p as f64 / self.q as f64)
    }
}

/// Integer matrix `[[a, b], [c, d]]` with determinant one and `|a + d| > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct ToralAutomorphism {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl TryFrom<[[i64; 2]; 2]> for ToralAutomorphism {
    type Error = ClassError;

    fn try_from(m: [[i64; 2]; 2]) -> Result<Self, Self::Error> {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<ToralAutomorphism> for [[i64; 2]; 2] {
    fn from(t: ToralAutomorphism) -> Self {
        t.matrix()
    }
}

impl ToralAutomorphism {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, ClassError> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(ClassError::NotUnimodular { det });
        }
        let trace = a + d;
        if trace.abs() <= 2 {
            return Err(ClassError::NotHyperbolic { trace });
        }
        Ok(Self { a, b, c, d })
    }

    /// Arnold's cat map `[[2, 1], [1, 1]]`.
    pub fn cat() -> Self {
        Self {
            a: 2,
            b: 1,
            c: 1,
            d: 1,
        }
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    /// Modulus of the expanding eigenvalue.
    pub fn lambda_plus(&self) -> f64 {
        let t = self.trace().abs() as f64;
        (t + (t * t - 4.0).sqrt()) / 2.0
    }

    /// Uniform expansion rate `log lambda_plus`.
    pub fn log_lambda(&self) -> f64 {
        self.lambda_plus().ln()
    }

    pub fn apply(&self, pt: TorusPoint) -> TorusPoint {
        TorusPoint::new(
            self.a as f64 * pt.x + self.b as f64 * pt.p,
            self.c as f64 * pt.x + self.d as f64 * pt.p,
        )
    }

    pub fn apply_rational(&self, pt: RationalPoint) -> RationalPoint {
        let q = pt.q as i128;
        let (x, p) = (pt.x as i128, pt.p as i128);
        let nx = (self.a as i128 * x + self.b as i128 * p).rem_euclid(q);
        let np = (self.c as i128 * x + self.d as i128 * p).rem_euclid(q);
        RationalPoint {
            x: nx as u64,
            p: np as u64,
            q: pt.q,
        }
    }

    /// Action on integer vectors, `A (n, m)`.
    pub fn apply_lattice(&self, v: (i64, i64)) -> (i64, i64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    /// Action of the transpose on integer vectors, `A^T (n, m)`.
    pub fn transpose_apply(&self, v: (i64, i64)) -> (i64, i64) {
        (self.a * v.0 + self.c * v.1, self.b * v.0 + self.d * v.1)
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// `A^t` for any integer `t`; `t = 0` gives the identity matrix, which is
    /// not hyperbolic but is a valid lattice action.
    pub fn power(&self, t: i64) -> Self {
        let base = if t < 0 { self.inverse() } else { *self };
        let mut acc = Self {
            a: 1,
            b: 0,
            c: 0,
            d: 1,
        };
        for _ in 0..t.unsigned_abs() {
            acc = base.compose(&acc);
        }
        acc
    }
}

/// Time-one classical step.
pub fn apply_map(a: &ToralAutomorphism, x: TorusPoint) -> TorusPoint {
    a.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_constants() {
        let a = ToralAutomorphism::cat();
        assert!((a.lambda_plus() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((a.log_lambda() - 0.9624236501192069).abs() < 1e-14);
        assert!((1.0 / a.lambda_plus() - 0.38196601125010515).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(matches!(
            ToralAutomorphism::new(2, 0, 0, 1),
            Err(ClassError::NotUnimodular { det: 2 })
        ));
        assert!(matches!(
            ToralAutomorphism::new(1, 1, 0, 1),
            Err(ClassError::NotHyperbolic { trace: 2 })
        ));
        assert!(
            ToralAutomorphism::new(-2, -1, -1, -1)
                .unwrap()
                .lambda_plus()
                > 2.0
        );
    }

    #[test]
    fn examples_of_iteration() {
        let a = ToralAutomorphism::cat();
        let origin = apply_map(&a, TorusPoint::new(0.0, 0.0));
        assert_eq!(origin, TorusPoint::new(0.0, 0.0));
        let y = apply_map(&a, TorusPoint::new(0.2, 0.4));
        assert!(y.distance(&TorusPoint::new(0.8, 0.6)) < 1e-14);
        let z = apply_map(&a, y);
        assert!(z.distance(&TorusPoint::new(0.2, 0.4)) < 1e-14);
    }

    #[test]
    fn power_and_inverse() {
        let a = ToralAutomorphism::cat();
        assert_eq!(a.power(3).compose(&a.power(-3)).matrix(), [[1, 0], [0, 1]]);
        assert_eq!(a.power(2).matrix(), [[5, 3], [3, 2]]);
        assert_eq!(a.compose(&a.inverse()).matrix(), [[1, 0], [0, 1]]);
    }

    #[test]
    fn serde_roundtrip_validates() {
        let json = serde_json::to_string(&ToralAutomorphism::cat()).unwrap();
        assert_eq!(json, "[[2,1],[1,1]]");
        assert!(serde_json::from_str::<ToralAutomorphism>("[[1,1],[0,1]]").is_err());
    }
}
