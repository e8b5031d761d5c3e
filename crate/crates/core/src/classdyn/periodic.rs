use std::collections::BTreeSet;

use super::automorphism::{RationalPoint, ToralAutomorphism};
use super::ClassError;

/// Largest denominator accepted by the orbit enumerators.
pub const MAX_DENOMINATOR: u64 = 64;

/// The orbit of `start` under `a`, beginning with `start`.
pub fn orbit_of(a: &ToralAutomorphism, start: RationalPoint) -> Vec<RationalPoint> {
    let mut orbit = vec![start];
    let mut cur = a.apply_rational(start);
    while cur != start {
        orbit.push(cur);
        cur = a.apply_rational(cur);
    }
    orbit
}

/// Orbit of the lattice point `(1/q, 2/q)`; for `q = 1` this is the fixed point at the origin.
pub fn find_periodic_orbit(
    a: &ToralAutomorphism,
    q: u64,
) -> Result<Vec<RationalPoint>, ClassError> {
    check_denominator(q)?;
    Ok(orbit_of(a, RationalPoint::new(1, 2, q)))
}

/// All orbits of the `q x q` lattice, each listed from its smallest point.
pub fn periodic_orbits(
    a: &ToralAutomorphism,
    q: u64,
) -> Result<Vec<Vec<RationalPoint>>, ClassError> {
    check_denominator(q)?;
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for x in 0..q {
        for p in 0..q {
            let pt = RationalPoint { x, p, q };
            if seen.contains(&pt) {
                continue;
            }
            let orbit = orbit_of(a, pt);
            seen.extend(orbit.iter().copied());
            orbits.push(orbit);
        }
    }
    Ok(orbits)
}

fn check_denominator(q: u64) -> Result<(), ClassError> {
    if q == 0 || q > MAX_DENOMINATOR {
        return Err(ClassError::InvalidArgument(format!(
            "denominator {q} outside 1..={MAX_DENOMINATOR}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_and_period_two() {
        let a = ToralAutomorphism::cat();
        assert_eq!(
            find_periodic_orbit(&a, 1).unwrap(),
            vec![RationalPoint::new(0, 0, 1)]
        );
        let o = find_periodic_orbit(&a, 5).unwrap();
        assert_eq!(
            o,
            vec![RationalPoint::new(1, 2, 5), RationalPoint::new(4, 3, 5)]
        );
    }

    #[test]
    fn orbits_partition_lattice_and_are_closed() {
        let a = ToralAutomorphism::cat();
        for q in [2u64, 7, 12, 64] {
            let orbits = periodic_orbits(&a, q).unwrap();
            assert_eq!(orbits.iter().map(Vec::len).sum::<usize>() as u64, q * q);
            for o in &orbits {
                let set: BTreeSet<_> = o.iter().copied().collect();
                assert!(o.iter().all(|pt| set.contains(&a.apply_rational(*pt))));
            }
        }
        assert!(periodic_orbits(&a, 65).is_err());
    }
}
