use entlab_core::classdyn::{ArcPartition, CoarseJacobian, ToralAutomorphism};
use entlab_core::eup::*;
use entlab_core::numkernel::random::{random_state, random_unitary};
use entlab_core::numkernel::{dft_matrix, normalized, ComplexMatrix, C64};
use entlab_core::qpartitions::*;
use entlab_core::quantization::{Propagator, QuantumTorusSpace};
use entlab_core::symbols::{PressureWeights, SymbolSequence};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAMBDA: f64 = 2.618033988749895;

fn basis_instance(u: ComplexMatrix) -> EupInstance {
    let d = u.rows();
    EupInstance::plain(basis_projectors(d), basis_projectors(d), u).unwrap()
}

#[test]
fn contraction_examples() {
    assert!(
        (contraction_coefficient(&basis_instance(ComplexMatrix::identity(5))) - 1.0).abs() < 1e-14
    );
    for n in [4, 8, 16] {
        let c = contraction_coefficient(&basis_instance(dft_matrix(n)));
        assert!((c - 1.0 / (n as f64).sqrt()).abs() < 1e-12);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let pi = random_partition_of_unity(6, 3, &mut rng);
    let tau = random_partition_of_unity(6, 2, &mut rng);
    let u = random_unitary(6, &mut rng);
    let unit = EupInstance::plain(pi.clone(), tau.clone(), u.clone()).unwrap();
    let lam = 2.5;
    let scaled = EupInstance::new(
        pi,
        tau,
        u,
        ComplexMatrix::identity(6),
        PressureWeights::uniform(3, 1, lam),
        PressureWeights::uniform(2, 1, lam),
        0.0,
    )
    .unwrap();
    let (c1, c2) = (
        contraction_coefficient(&unit),
        contraction_coefficient(&scaled),
    );
    assert!((c2 - lam * lam * c1).abs() < 1e-12 * c2);
}

#[test]
fn localization_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pi = random_partition_of_unity(4, 3, &mut rng);
    let psi = normalized(&random_state(4, &mut rng));
    assert_eq!(
        localization_defect(&psi, &pi, &ComplexMatrix::identity(4)),
        0.0
    );
    let zero = ComplexMatrix::zeros(4, 4);
    let expect = pi
        .iter()
        .map(|p| entlab_core::numkernel::norm(&p.matvec(&psi)))
        .fold(0.0, f64::max);
    assert!((localization_defect(&psi, &pi, &zero) - expect).abs() < 1e-15);
    assert!(expect <= 1.0);

    // Basis projectors, psi = (1, 1, 1, 1)/2, O = projector on the first two coordinates:
    // (Id - O) pi_k psi vanishes for k < 2 and has norm 1/2 otherwise.
    let psi = vec![C64::new(0.5, 0.0); 4];
    let o = ComplexMatrix::from_real_diag(&[1.0, 1.0, 0.0, 0.0]);
    assert!((localization_defect(&psi, &basis_projectors(4), &o) - 0.5).abs() < 1e-15);
}

#[test]
fn dft_position_states_saturate() {
    for n in [4, 8, 16] {
        let f = dft_matrix(n);
        let inst = basis_instance(f.clone());
        for k in [0, n / 2, n - 1] {
            let mut psi = vec![C64::new(0.0, 0.0); n];
            psi[k] = C64::new(1.0, 0.0);
            let r = check_eup(&inst, &psi).unwrap();
            assert!(r.pressure_pi.abs() < 1e-15);
            assert!((r.pressure_tau_of_upsi - (n as f64).ln()).abs() < 1e-12);
            assert!(r.slack.abs() < 1e-9);
            let b = basis_eup_report(&f, &psi).unwrap();
            assert!((b.slack - r.slack).abs() < 1e-12 && (b.c - r.c).abs() < 1e-14);
        }
    }
}

#[test]
fn eigenvector_bound() {
    let f = dft_matrix(12);
    let eig = entlab_core::numkernel::unitary_eig(&f, 3).unwrap();
    let c = f.max_abs();
    for j in 0..12 {
        let psi = eig.eigenvector(j);
        let r = basis_eup_report(&f, &psi).unwrap();
        assert!((r.pressure_pi - r.pressure_tau_of_upsi).abs() < 1e-9);
        assert!(r.pressure_pi >= -c.ln() - 1e-9);
    }
}

#[test]
fn invariance_under_phase_and_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d = 6;
    let pi = random_partition_of_unity(d, 3, &mut rng);
    let tau = random_partition_of_unity(d, 4, &mut rng);
    let u = random_unitary(d, &mut rng);
    let psi = normalized(&random_state(d, &mut rng));
    let inst = EupInstance::plain(pi.clone(), tau.clone(), u.clone()).unwrap();
    let r = check_eup(&inst, &psi).unwrap();
    let phased: Vec<C64> = psi.iter().map(|z| z * C64::from_polar(1.0, 0.7)).collect();
    let rp = check_eup(&inst, &phased).unwrap();
    assert!((r.slack - rp.slack).abs() < 1e-12);

    let q = random_unitary(d, &mut rng);
    let conj = |m: &ComplexMatrix| q.matmul(m).matmul(&q.adjoint());
    let inst_q = EupInstance::plain(
        pi.iter().map(conj).collect(),
        tau.iter().map(conj).collect(),
        conj(&u),
    )
    .unwrap();
    let rq = check_eup(&inst_q, &q.matvec(&psi)).unwrap();
    assert!((r.slack - rq.slack).abs() < 1e-10);
    assert!((r.c - rq.c).abs() < 1e-10);
}

#[test]
fn invalid_instances_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pi = random_partition_of_unity(4, 2, &mut rng);
    let mut bad = pi.clone();
    bad[0] = bad[0].scale(C64::new(1.1, 0.0));
    let u = random_unitary(4, &mut rng);
    assert!(EupInstance::plain(bad, pi.clone(), u.clone()).is_err());
    assert!(EupInstance::plain(pi.clone(), pi.clone(), u.scale(C64::new(2.0, 0.0))).is_err());
    let v = PressureWeights::uniform(3, 1, 1.0);
    assert!(EupInstance::new(
        pi.clone(),
        pi,
        u,
        ComplexMatrix::identity(4),
        v.clone(),
        v,
        0.0
    )
    .is_err());
}

#[test]
fn hypothesis_violation_is_flagged() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let d = 5;
    let pi = random_partition_of_unity(d, 2, &mut rng);
    let u = random_unitary(d, &mut rng);
    let psi = normalized(&random_state(d, &mut rng));
    let inst = EupInstance::new(
        pi.clone(),
        pi,
        u,
        ComplexMatrix::zeros(d, d),
        PressureWeights::uniform(2, 1, 1.0),
        PressureWeights::uniform(2, 1, 1.0),
        0.0,
    )
    .unwrap();
    let r = check_eup(&inst, &psi).unwrap();
    assert!(!r.hypothesis_holds);
    assert!(r.passes());
}

#[test]
fn jacobian_weight_examples() {
    let cat = ToralAutomorphism::cat();
    let jac = CoarseJacobian::with_default_r(&cat, &ArcPartition::uniform(2).unwrap());
    for n in 1..=5 {
        let alphas: Vec<SymbolSequence> = SymbolSequence::all(2, n).collect();
        let v = jacobian_weights(&alphas, &jac).unwrap();
        let expect = LAMBDA.powf((n as f64 - 1.0) / 2.0);
        for (_, x) in v.entries() {
            assert!((x - expect).abs() < 1e-12 * expect);
        }
        assert!(v.min() >= 1.0);
    }
    // Monotone along extensions, including forbidden transitions.
    let jac = jac.forbid(0, 1);
    for n in 1..5 {
        let short: Vec<SymbolSequence> = SymbolSequence::all(2, n).collect();
        let vs = jacobian_weights(&short, &jac).unwrap();
        for a in &short {
            for s in 0..2 {
                let mut b = a.clone();
                b.push(s);
                let vb = jacobian_weights(&[b.clone()], &jac).unwrap();
                assert!(vb.get(&b).unwrap() >= vs.get(a).unwrap());
            }
        }
    }
    // Tempered: max weight <= (2 pi N)^{K_1}, K_1 = log(lambda) n_E / log(2 pi N).
    let jac = CoarseJacobian::with_default_r(&cat, &ArcPartition::uniform(2).unwrap());
    for nn in [32, 64, 128] {
        let space = QuantumTorusSpace::new(nn).unwrap();
        let ne = ehrenfest_time(&space, &cat, DEFAULT_EHRENFEST_DELTA);
        let k1 = cat.log_lambda() * ne as f64 / space.log_inverse_hbar();
        assert!(k1 <= 1.0);
        let v = WeightScheme::Jacobian(jac.clone()).weights(2, ne).unwrap();
        assert!(v.is_tempered(2.0 * std::f64::consts::PI * nn as f64, k1));
    }
    assert!(jacobian_weights(
        &[
            SymbolSequence::new(vec![0]),
            SymbolSequence::new(vec![0, 1])
        ],
        &jac
    )
    .is_err());
}

fn corollary_setup() -> (Propagator, QuantumPartition) {
    let space = QuantumTorusSpace::new(32).unwrap();
    let u = Propagator::new(&space, &ToralAutomorphism::cat()).unwrap();
    let qp = quantize_partition(&space, &build_smooth_partition(2, 0.5, 0.1).unwrap());
    (u, qp)
}

#[test]
fn corollary_exhaustive_small_case() {
    let (u, qp) = corollary_setup();
    let cat = ToralAutomorphism::cat();
    let jac = CoarseJacobian::with_default_r(&cat, &ArcPartition::uniform(2).unwrap());
    let eig = u.eigenstates(1).unwrap();
    for j in [0, 11, 31] {
        let psi = eig.eigenvector(j);
        let unit = corollary_instance(&psi, &qp, &u, 3, &WeightScheme::Unit, 1).unwrap();
        assert_eq!(unit.pairs_evaluated, 64);
        assert!(!unit.report.advisory);
        assert!(unit.report.slack >= -1e-9);
        let jw =
            corollary_instance(&psi, &qp, &u, 3, &WeightScheme::Jacobian(jac.clone()), 1).unwrap();
        assert!(jw.report.slack >= -1e-9);
        // Constant Jacobian weights shift both sides by the same amount.
        assert!((jw.report.slack - unit.report.slack).abs() < 1e-9);
        // Unit weights: the pressures are the two refined entropies.
        let h_pi =
            entlab_core::entropy::quantum_entropy(&psi, &qp, &u, 3, Ordering::Reversed, 1 << 10)
                .unwrap();
        assert!((unit.report.pressure_pi - h_pi).abs() < 1e-12);
    }
}

#[test]
fn corollary_matches_generic_instance() {
    let (u, qp) = corollary_setup();
    let n = 3;
    let eig = u.eigenstates(1).unwrap();
    let psi = eig.eigenvector(5);
    let words: Vec<SymbolSequence> = SymbolSequence::all(2, n).collect();
    let pi: Vec<ComplexMatrix> = words
        .iter()
        .map(|a| refined_operator(&qp, &u, a, Ordering::Reversed, 1 << 10).unwrap())
        .collect();
    let tau: Vec<ComplexMatrix> = words
        .iter()
        .map(|a| refined_operator(&qp, &u, a, Ordering::Forward, 1 << 10).unwrap())
        .collect();
    let d = 32;
    let inst = EupInstance::new(
        pi,
        tau,
        u.power(n as i64),
        ComplexMatrix::identity(d),
        PressureWeights::uniform(2, n, 1.0),
        PressureWeights::uniform(2, n, 1.0),
        0.0,
    )
    .unwrap();
    let generic = check_eup(&inst, &psi).unwrap();
    let fast = corollary_instance(&psi, &qp, &u, n, &WeightScheme::Unit, 1)
        .unwrap()
        .report;
    assert!((generic.c - fast.c).abs() < 1e-10);
    assert!((generic.pressure_pi - fast.pressure_pi).abs() < 1e-10);
    assert!((generic.pressure_tau_of_upsi - fast.pressure_tau_of_upsi).abs() < 1e-10);
}

#[test]
fn subadditivity_defects_are_reported() {
    let space = QuantumTorusSpace::new(64).unwrap();
    let u = Propagator::new(&space, &ToralAutomorphism::cat()).unwrap();
    let qp = quantize_partition(
        &space,
        &build_smooth_partition(4, 0.25, 1.0 / 16.0).unwrap(),
    );
    let eig = u.eigenstates(1).unwrap();
    let psi = eig.eigenvector(3);
    assert_eq!(
        subadditivity_check(
            &psi,
            &qp,
            &u,
            2,
            0,
            5,
            &WeightScheme::Unit,
            Ordering::Reversed
        )
        .unwrap(),
        0.0
    );
    let r = subadditivity_check(
        &psi,
        &qp,
        &u,
        2,
        3,
        5,
        &WeightScheme::Unit,
        Ordering::Reversed,
    )
    .unwrap();
    assert!(r.is_finite() && r.abs() < 2.0 * 4f64.ln() * 5.0);
    assert!(subadditivity_check(
        &psi,
        &qp,
        &u,
        3,
        3,
        5,
        &WeightScheme::Unit,
        Ordering::Reversed
    )
    .is_err());
}

#[test]
fn span_projector_is_orthogonal_and_keeps_its_span() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let d = 9;
    let a = random_state(d, &mut rng);
    let b = random_state(d, &mut rng);
    let combo: Vec<C64> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| 2.0 * x - C64::new(0.0, 1.0) * y)
        .collect();
    let o = span_projector(&[a.clone(), b.clone(), combo], d).unwrap();
    assert!(o.hermiticity_defect() < 1e-13);
    assert!(o.matmul(&o).max_abs_diff(&o) < 1e-13);
    assert!((o.trace().re - 2.0).abs() < 1e-12);
    for v in [&a, &b] {
        let pv = o.matvec(v);
        assert!(pv.iter().zip(v.iter()).all(|(x, y)| (x - y).norm() < 1e-12));
    }
    assert_eq!(span_projector(&[], d).unwrap().frobenius_norm(), 0.0);
    assert!(span_projector(&[vec![C64::new(1.0, 0.0); 3]], d).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_fuzzed_instances_hold(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.random_range(2..=12);
        let np = rng.random_range(1..=4);
        let nt = rng.random_range(1..=4);
        let pi = random_partition_of_unity(d, np, &mut rng);
        let tau = random_partition_of_unity(d, nt, &mut rng);
        let u = random_unitary(d, &mut rng);
        let v = PressureWeights::from_fn(np, 1, |_| rng.random_range(1.0..10.0));
        let w = PressureWeights::from_fn(nt, 1, |_| rng.random_range(1.0..10.0));
        let inst = EupInstance::new(pi, tau, u, ComplexMatrix::identity(d), v, w, 0.0).unwrap();
        let psi = normalized(&random_state(d, &mut rng));
        let r = check_eup(&inst, &psi).unwrap();
        prop_assert!(r.hypothesis_holds);
        prop_assert!(r.slack >= -1e-9, "slack {}", r.slack);
    }
}
