use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::automorphism::{RationalPoint, ToralAutomorphism};
use super::ClassError;

/// Invariant probability measures of a toral automorphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvariantMeasure {
    Lebesgue,
    /// Uniform measure on a finite orbit of rational points.
    PeriodicOrbit {
        points: Vec<RationalPoint>,
    },
    Mixture {
        components: Vec<MixtureComponent>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub measure: InvariantMeasure,
}

const MIXTURE_SUM_TOL: f64 = 1e-12;

impl InvariantMeasure {
    /// Dirac mass at the origin.
    pub fn origin() -> Self {
        Self::PeriodicOrbit {
            points: vec![RationalPoint::new(0, 0, 1)],
        }
    }

    pub fn periodic(points: Vec<RationalPoint>) -> Self {
        Self::PeriodicOrbit { points }
    }

    pub fn mixture(components: Vec<(f64, InvariantMeasure)>) -> Self {
        Self::Mixture {
            components: components
                .into_iter()
                .map(|(weight, measure)| MixtureComponent { weight, measure })
                .collect(),
        }
    }

    /// Checks weights and orbit closure under `a`.
    pub fn validate(&self, a: &ToralAutomorphism) -> Result<(), ClassError> {
        match self {
            Self::Lebesgue => Ok(()),
            Self::PeriodicOrbit { points } => {
                if points.is_empty() {
                    return Err(ClassError::InvalidMeasure("empty orbit".into()));
                }
                let set: BTreeSet<_> = points.iter().copied().collect();
                if set.len() != points.len() {
                    return Err(ClassError::InvalidMeasure("repeated orbit point".into()));
                }
                if let Some(pt) = points
                    .iter()
                    .find(|pt| !set.contains(&a.apply_rational(**pt)))
                {
                    return Err(ClassError::InvalidMeasure(format!(
                        "orbit not closed: image of ({}, {})/{} missing",
                        pt.x, pt.p, pt.q
                    )));
                }
                Ok(())
            }
            Self::Mixture { components } => {
                if components.is_empty() {
                    return Err(ClassError::InvalidMeasure("empty mixture".into()));
                }
                if components
                    .iter()
                    .any(|c| c.weight.is_nan() || c.weight <= 0.0)
                {
                    return Err(ClassError::InvalidMeasure(
                        "mixture weights must be positive".into(),
                    ));
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > MIXTURE_SUM_TOL {
                    return Err(ClassError::InvalidMeasure(format!(
                        "mixture weights sum to {total}"
                    )));
                }
                components.iter().try_for_each(|c| c.measure.validate(a))
            }
        }
    }

    /// Mass carried by the Lebesgue components.
    pub fn lebesgue_mass(&self) -> f64 {
        match self {
            Self::Lebesgue => 1.0,
            Self::PeriodicOrbit { .. } => 0.0,
            Self::Mixture { components } => components
                .iter()
                .map(|c| c.weight * c.measure.lebesgue_mass())
                .sum(),
        }
    }

    /// Atoms with their masses, flattened through mixtures.
    pub fn atoms(&self) -> Vec<(RationalPoint, f64)> {
        let mut out = Vec::new();
        self.collect_atoms(1.0, &mut out);
        out
    }

    fn collect_atoms(&self, scale: f64, out: &mut Vec<(RationalPoint, f64)>) {
        match self {
            Self::Lebesgue => {}
            Self::PeriodicOrbit { points } => {
                let m = scale / points.len() as f64;
                out.extend(points.iter().map(|&pt| (pt, m)));
            }
            Self::Mixture { components } => {
                for c in components {
                    c.measure.collect_atoms(scale * c.weight, out);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let m = InvariantMeasure::mixture(vec![
            (0.5, InvariantMeasure::Lebesgue),
            (0.5, InvariantMeasure::origin()),
        ]);
        let s = serde_json::to_string(&m).unwrap();
        let back: InvariantMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(s.contains("\"kind\":\"mixture\""));
        assert!((m.lebesgue_mass() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let a = ToralAutomorphism::cat();
        assert!(InvariantMeasure::origin().validate(&a).is_ok());
        let open = InvariantMeasure::periodic(vec![RationalPoint::new(1, 2, 5)]);
        assert!(open.validate(&a).is_err());
        let bad = InvariantMeasure::mixture(vec![(0.3, InvariantMeasure::Lebesgue)]);
        assert!(bad.validate(&a).is_err());
    }
}
