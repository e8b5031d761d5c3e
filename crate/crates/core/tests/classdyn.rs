use entlab_core::classdyn::*;
use entlab_core::symbols::SymbolSequence;
use proptest::prelude::*;

fn cat() -> ToralAutomorphism {
    ToralAutomorphism::cat()
}

/// Lebesgue weight of a depth-3 cylinder for a uniform partition, using the
/// recursion `x_2 = tr(A) x_1 - x_0 (mod 1)` valid when `b = 1`, integrated
/// over `x_1` with the midpoint rule on the exact length in `x_0`.
fn depth3_oracle(k: usize, alpha: [usize; 3]) -> f64 {
    let w = 1.0 / k as f64;
    let (a0, a1, a2) = (
        alpha[0] as f64 * w,
        alpha[1] as f64 * w,
        alpha[2] as f64 * w,
    );
    let steps = 20_000;
    let mut total = 0.0;
    for i in 0..steps {
        let x1 = a1 + w * (i as f64 + 0.5) / steps as f64;
        // x_0 in [a0, a0+w) and (3 x1 - x0) mod 1 in [a2, a2+w):
        // x0 in 3 x1 - [a2, a2+w) + m for integer m.
        let c = 3.0 * x1;
        let mut len = 0.0;
        for m in -4..=4 {
            let lo = c - a2 - w + m as f64;
            let hi = c - a2 + m as f64;
            len += (hi.min(a0 + w) - lo.max(a0)).max(0.0);
        }
        total += len;
    }
    total * w / steps as f64
}

#[test]
fn depth_one_is_arc_length() {
    let p = ArcPartition::uniform(5).unwrap();
    let t = cylinder_weights(
        &InvariantMeasure::Lebesgue,
        &cat(),
        &p,
        1,
        &PolygonWeigher::default(),
    )
    .unwrap();
    for (_, w) in t.iter() {
        assert!((w - 0.2).abs() < 1e-15);
    }
}

#[test]
fn depth_two_pairs_are_independent() {
    let p = ArcPartition::uniform(4).unwrap();
    let poly = PolygonWeigher::default();
    let w = cylinder_weight(
        &InvariantMeasure::Lebesgue,
        &cat(),
        &p,
        &SymbolSequence::from_one_based(&[1, 1], 4).unwrap(),
        &poly,
    )
    .unwrap();
    assert!((w - 1.0 / 16.0).abs() < 1e-12);
    let t = cylinder_weights(&InvariantMeasure::Lebesgue, &cat(), &p, 2, &poly).unwrap();
    assert_eq!(t.len(), 16);
    assert!(t.values().all(|w| (w - 1.0 / 16.0).abs() < 1e-12));
}

#[test]
fn depth_three_matches_interval_oracle() {
    let k = 4;
    let p = ArcPartition::uniform(k).unwrap();
    let t = cylinder_weights(
        &InvariantMeasure::Lebesgue,
        &cat(),
        &p,
        3,
        &PolygonWeigher::default(),
    )
    .unwrap();
    for alpha in SymbolSequence::all(k, 3) {
        let oracle = depth3_oracle(k, [alpha.symbol(0), alpha.symbol(1), alpha.symbol(2)]);
        assert!(
            (t.get(&alpha) - oracle).abs() < 1e-8,
            "{alpha}: {} vs {oracle}",
            t.get(&alpha)
        );
    }
}

#[test]
fn grid_agrees_with_polygon_at_sampling_accuracy() {
    let p = ArcPartition::uniform(4).unwrap();
    let grid = GridWeigher { side: 256, seed: 3 };
    let exact = cylinder_weights(
        &InvariantMeasure::Lebesgue,
        &cat(),
        &p,
        3,
        &PolygonWeigher::default(),
    )
    .unwrap();
    let sampled = cylinder_weights(&InvariantMeasure::Lebesgue, &cat(), &p, 3, &grid).unwrap();
    for alpha in SymbolSequence::all(4, 3) {
        assert!((exact.get(&alpha) - sampled.get(&alpha)).abs() < 4.0 / 256.0);
    }
    let alpha = SymbolSequence::new(vec![1, 3, 0]);
    let single = cylinder_weight(&InvariantMeasure::Lebesgue, &cat(), &p, &alpha, &grid).unwrap();
    assert!((single - sampled.get(&alpha)).abs() < 1e-15);
}

#[test]
fn atomic_measure_weights() {
    let p = ArcPartition::uniform(3).unwrap();
    let origin = InvariantMeasure::origin();
    let poly = PolygonWeigher::default();
    let zeros = SymbolSequence::new(vec![0; 6]);
    assert_eq!(
        cylinder_weight(&origin, &cat(), &p, &zeros, &poly).unwrap(),
        1.0
    );
    let other = SymbolSequence::new(vec![0, 1, 0]);
    assert_eq!(
        cylinder_weight(&origin, &cat(), &p, &other, &poly).unwrap(),
        0.0
    );

    let orbit = InvariantMeasure::periodic(find_periodic_orbit(&cat(), 5).unwrap());
    let t = cylinder_weights(&orbit, &cat(), &p, 4, &poly).unwrap();
    assert_eq!(t.len(), 2);
    assert!(t.values().all(|w| (w - 0.5).abs() < 1e-15));
}

#[test]
fn tables_sum_to_one_and_are_invariant() {
    let p = ArcPartition::uniform(3).unwrap();
    let mu = InvariantMeasure::mixture(vec![
        (0.25, InvariantMeasure::Lebesgue),
        (
            0.75,
            InvariantMeasure::periodic(find_periodic_orbit(&cat(), 7).unwrap()),
        ),
    ]);
    let tables = cylinder_weights_by_depth(
        &mu,
        &cat(),
        &p,
        6,
        &PolygonWeigher::default(),
        DEFAULT_CYLINDER_CAP,
    )
    .unwrap();
    for (i, t) in tables.iter().enumerate() {
        assert!((t.total() - 1.0).abs() < 1e-12, "depth {}", i + 1);
    }
    // Pullback consistency: summing out the first symbol of depth n+1 gives depth n.
    for n in 1..6 {
        let marginal = tables[n].suffix_marginal(n);
        for (alpha, w) in tables[n - 1].iter() {
            assert!((marginal.get(&alpha) - w).abs() < 1e-12);
        }
    }
}

#[test]
fn mixture_is_linear() {
    let p = ArcPartition::uniform(4).unwrap();
    let poly = PolygonWeigher::default();
    let orbit = InvariantMeasure::periodic(find_periodic_orbit(&cat(), 5).unwrap());
    let mix = InvariantMeasure::mixture(vec![
        (0.4, InvariantMeasure::Lebesgue),
        (0.6, orbit.clone()),
    ]);
    let tm = cylinder_weights(&mix, &cat(), &p, 4, &poly).unwrap();
    let tl = cylinder_weights(&InvariantMeasure::Lebesgue, &cat(), &p, 4, &poly).unwrap();
    let to = cylinder_weights(&orbit, &cat(), &p, 4, &poly).unwrap();
    let combined = tl.combine(0.4, &to, 0.6).unwrap();
    for alpha in SymbolSequence::all(4, 4) {
        assert!((tm.get(&alpha) - combined.get(&alpha)).abs() < 1e-14);
    }
}

#[test]
fn deep_tables_for_eight_arcs() {
    let p = ArcPartition::uniform(8).unwrap();
    let start = std::time::Instant::now();
    let tables = cylinder_weights_by_depth(
        &InvariantMeasure::Lebesgue,
        &cat(),
        &p,
        11,
        &PolygonWeigher::default(),
        DEFAULT_CYLINDER_CAP,
    )
    .unwrap();
    let h: Vec<f64> = tables
        .iter()
        .map(|t| t.values().filter(|&w| w > 0.0).map(|w| -w * w.ln()).sum())
        .collect();
    eprintln!(
        "depth 11 in {:?}, {} cylinders, h = {:?}",
        start.elapsed(),
        tables[10].len(),
        h
    );
    assert!((tables[10].total() - 1.0).abs() < 1e-9);
    assert!((h[10] - h[9] - ToralAutomorphism::cat().log_lambda()).abs() < 0.1);
}

#[test]
fn cap_is_enforced() {
    let p = ArcPartition::uniform(4).unwrap();
    let r = cylinder_weights_by_depth(
        &InvariantMeasure::Lebesgue,
        &cat(),
        &p,
        6,
        &PolygonWeigher::default(),
        100,
    );
    assert!(matches!(r, Err(ClassError::CapExceeded { .. })));
}

#[test]
fn decay_bound_structure() {
    let p = ArcPartition::uniform(3).unwrap();
    let jac = CoarseJacobian::with_default_r(&cat(), &p).forbid(0, 2);
    let (c, fast, slow) = jac.decay_constants();
    for n in 1..8 {
        for alpha in SymbolSequence::all(3, n) {
            let j = jac.jn(&alpha);
            assert!(j >= (-(n as f64) * fast).exp() / c * (1.0 - 1e-12));
            assert!(j <= c * (-(n as f64) * slow).exp() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn ruelle_values() {
    let p = ArcPartition::uniform(4).unwrap();
    let a = cat();
    let ll = a.log_lambda();
    assert!((ruelle_bound(&InvariantMeasure::Lebesgue, &a).unwrap() - 0.9624).abs() < 1e-4);
    assert!((ruelle_bound(&InvariantMeasure::origin(), &a).unwrap() - ll).abs() < 1e-15);
    let pairs = cylinder_weights(
        &InvariantMeasure::Lebesgue,
        &a,
        &p,
        2,
        &PolygonWeigher::default(),
    )
    .unwrap();
    let jac = CoarseJacobian::with_default_r(&a, &p);
    for n_o in 1..6 {
        let b = coarse_ruelle_bound(&pairs, &jac, n_o).unwrap();
        assert!((b - (n_o as f64 - 1.0) / n_o as f64 * ll).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn map_preserves_rational_lattice(x in 0i64..60, p in 0i64..60, q in 1u64..61) {
        let a = cat();
        let pt = RationalPoint::new(x, p, q);
        let img = a.apply_rational(pt);
        let approx = a.apply(pt.to_point());
        prop_assert!(img.to_point().distance(&approx) < 1e-12);
        prop_assert_eq!(a.inverse().apply_rational(img), pt);
    }

    #[test]
    fn jacobian_multiplicative(symbols in proptest::collection::vec(0usize..3, 2..8), split in 1usize..7) {
        let p = ArcPartition::uniform(3).unwrap();
        let jac = CoarseJacobian::with_default_r(&cat(), &p).forbid(1, 1);
        let alpha = SymbolSequence::new(symbols.clone());
        let split = split.min(alpha.len() - 1);
        // Overlap on the junction symbol.
        let left = alpha.prefix(split + 1);
        let right = alpha.suffix(alpha.len() - split);
        let joined = jac.jn(&left) * jac.jn(&right);
        prop_assert!((jac.jn(&alpha) - joined).abs() <= 1e-12 * jac.jn(&alpha));
    }

    #[test]
    fn arc_lookup_consistent(x in 0.0f64..1.0, k in 1usize..12) {
        let p = ArcPartition::uniform(k).unwrap();
        let arc = p.arc_of(x);
        let (s, e) = p.arc(arc);
        prop_assert!(s <= x && x < e);
    }
}
