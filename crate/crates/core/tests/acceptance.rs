//! Acceptance suite: one pass/fail line per criterion.

use std::cell::OnceCell;
use std::time::{Duration, Instant};

use entlab_core::classdyn::*;
use entlab_core::entropy::*;
use entlab_core::eup::*;
use entlab_core::numkernel::random::{random_state, random_unitary};
use entlab_core::numkernel::{dft_matrix, normalized, ComplexMatrix, C64};
use entlab_core::qpartitions::*;
use entlab_core::quantization::*;
use entlab_core::symbols::PressureWeights;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LOG_LAMBDA: f64 = 0.9624236501192069;
const SMOOTH_WIDTH: f64 = 1.0 / 16.0;

struct Outcome {
    pass: bool,
    detail: String,
    budget: Duration,
}

fn outcome(pass: bool, detail: String, budget_secs: u64) -> Outcome {
    Outcome {
        pass,
        detail,
        budget: Duration::from_secs(budget_secs),
    }
}

fn torus(n: usize, k: usize) -> (QuantumTorusSpace, Propagator, QuantumPartition) {
    let space = QuantumTorusSpace::new(n).unwrap();
    let u = Propagator::new(&space, &ToralAutomorphism::cat()).unwrap();
    let sp = build_smooth_partition(k, 1.0 / k as f64, SMOOTH_WIDTH.min(0.25 / k as f64)).unwrap();
    let qp = quantize_partition(&space, &sp);
    (space, u, qp)
}

fn slope(ys: &[(usize, f64)]) -> f64 {
    let m = ys.len() as f64;
    let mx = ys.iter().map(|p| p.0 as f64).sum::<f64>() / m;
    let my = ys.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = ys.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
    let sxx: f64 = ys.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_1() -> Outcome {
    let cat = ToralAutomorphism::cat();
    let mut worst_unitary = 0.0f64;
    let mut worst_egorov = 0.0f64;
    let sizes = [8usize, 16, 32, 64, 128, 256, 512];
    for &n in &sizes {
        let space = QuantumTorusSpace::new(n).unwrap();
        let u = Propagator::new(&space, &cat).unwrap();
        let m = u.matrix();
        let gram = m.adjoint().matmul(m);
        worst_unitary = worst_unitary.max((&gram - &ComplexMatrix::identity(n)).frobenius_norm());
        let ne = ehrenfest_time(&space, &cat, DEFAULT_EHRENFEST_DELTA);
        let mut columns: Vec<Vec<C64>> = (0..n)
            .map(|k| QuantumState::position(&space, k).into_amplitudes())
            .collect();
        for t in 1..=ne as i64 {
            columns = columns.iter().map(|c| u.apply(c)).collect();
            let ut = ComplexMatrix::from_columns(&columns).unwrap();
            for p in -3..=3 {
                for q in -3..=3 {
                    let a = Observable::fourier_mode(p, q);
                    worst_egorov = worst_egorov.max(egorov_defect_bound(&u, &ut, &a, t));
                }
            }
        }
    }
    outcome(
        worst_unitary <= 1e-10 && worst_egorov <= 1e-9,
        format!(
            "propagator certificate over N={sizes:?}: max |U*U - I| = {worst_unitary:.2e} (<= 1e-10), max Egorov defect = {worst_egorov:.2e} (<= 1e-9)"
        ),
        120,
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let d = rng.random_range(2..=64);
        let np = rng.random_range(2..=4);
        let nt = rng.random_range(2..=4);
        let pi = random_partition_of_unity(d, np, &mut rng);
        let tau = random_partition_of_unity(d, nt, &mut rng);
        let u = random_unitary(d, &mut rng);
        let v = PressureWeights::from_fn(np, 1, |_| rng.random_range(1.0..=10.0));
        let w = PressureWeights::from_fn(nt, 1, |_| rng.random_range(1.0..=10.0));
        let inst = EupInstance::new(pi, tau, u, ComplexMatrix::identity(d), v, w, 0.0).unwrap();
        let psi = normalized(&random_state(d, &mut rng));
        worst = worst.min(check_eup(&inst, &psi).unwrap().slack);
    }
    let mut worst_local = f64::INFINITY;
    let mut all_hold = true;
    for i in 0..100 {
        let d = rng.random_range(2..=32);
        let np = rng.random_range(2..=4);
        let nt = rng.random_range(2..=4);
        let pi = random_partition_of_unity(d, np, &mut rng);
        let tau = random_partition_of_unity(d, nt, &mut rng);
        let u = random_unitary(d, &mut rng);
        let psi = normalized(&random_state(d, &mut rng));
        // O is an orthogonal projector on a random subspace; half of the time that
        // subspace contains every pi_k psi.
        let mut spanning: Vec<Vec<C64>> = Vec::new();
        if i % 2 == 0 {
            spanning.extend(pi.iter().map(|p| p.matvec(&psi)));
        }
        for _ in 0..rng.random_range(1..=d) {
            spanning.push(random_state(d, &mut rng));
        }
        let o = span_projector(&spanning, d).unwrap();
        let defect = localization_defect(&psi, &pi, &o);
        let eps = defect.max(1e-3);
        let v = PressureWeights::from_fn(np, 1, |_| rng.random_range(1.0..=10.0));
        let w = PressureWeights::from_fn(nt, 1, |_| rng.random_range(1.0..=10.0));
        let inst = EupInstance::new(pi, tau, u, o, v, w, eps).unwrap();
        let r = check_eup(&inst, &psi).unwrap();
        all_hold &= r.hypothesis_holds;
        worst_local = worst_local.min(r.slack);
    }
    outcome(
        worst >= -SLACK_TOL && worst_local >= -SLACK_TOL && all_hold,
        format!(
            "weighted uncertainty: min slack {worst:.3e} over 1000 instances (O = Id), {worst_local:.3e} over 100 instances with projector O and epsilon > 0 (>= -1e-9)"
        ),
        300,
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = f64::INFINITY;
    let mut worst_equality = 0.0f64;
    for n in [8usize, 16, 32, 64, 128] {
        let f = dft_matrix(n);
        for _ in 0..1000 {
            let psi = normalized(&random_state(n, &mut rng));
            worst = worst.min(basis_eup_report(&f, &psi).unwrap().slack);
        }
        for k in 0..n {
            let mut psi = vec![C64::new(0.0, 0.0); n];
            psi[k] = C64::new(1.0, 0.0);
            let r = basis_eup_report(&f, &psi).unwrap();
            worst_equality = worst_equality
                .max((r.pressure_pi + r.pressure_tau_of_upsi - (n as f64).ln()).abs());
        }
    }
    outcome(
        worst >= -SLACK_TOL && worst_equality <= 1e-9,
        format!(
            "Maassen-Uffink for the DFT, N in 8..128: min slack {worst:.3e} over 5000 random states, max |h + h(F psi) - log N| on basis states {worst_equality:.2e}"
        ),
        60,
    )
}

struct KsRow {
    name: String,
    estimate: f64,
    target: f64,
    tol: f64,
    ruelle: f64,
}

fn ks_rows() -> Vec<KsRow> {
    let cat = ToralAutomorphism::cat();
    let p = ArcPartition::uniform(8).unwrap();
    let weigher = PolygonWeigher::default();
    let mut rows = Vec::new();
    let mut push = |name: String, mu: InvariantMeasure, target: f64, tol: f64| {
        let est = ks_entropy_estimate(&mu, &cat, &p, 11, &weigher, DEFAULT_CYLINDER_CAP).unwrap();
        rows.push(KsRow {
            name,
            estimate: est.difference_estimate,
            target,
            tol,
            ruelle: ruelle_bound(&mu, &cat).unwrap(),
        });
    };
    push(
        "Lebesgue".into(),
        InvariantMeasure::Lebesgue,
        LOG_LAMBDA,
        0.1,
    );
    push("origin".into(), InvariantMeasure::origin(), 0.0, 1e-12);
    for q in [2, 3, 5, 7] {
        let orbit = find_periodic_orbit(&cat, q).unwrap();
        push(
            format!("orbit q={q}"),
            InvariantMeasure::periodic(orbit),
            0.0,
            1e-12,
        );
    }
    push(
        "Leb/2 + origin/2".into(),
        InvariantMeasure::mixture(vec![
            (0.5, InvariantMeasure::Lebesgue),
            (0.5, InvariantMeasure::origin()),
        ]),
        0.5 * LOG_LAMBDA,
        0.1,
    );
    rows
}

fn criterion_4(rows: &[KsRow]) -> Outcome {
    let pass = rows.iter().all(|r| (r.estimate - r.target).abs() <= r.tol);
    let summary: Vec<String> = rows
        .iter()
        .map(|r| format!("{} {:.4}", r.name, r.estimate))
        .collect();
    outcome(
        pass,
        format!(
            "KS entropy, K=8, h_11 - h_10: {} (targets 0.9624 +- 0.1, 0 +- 1e-12, 0.4812 +- 0.1)",
            summary.join(", ")
        ),
        180,
    )
}

fn criterion_5(rows: &[KsRow]) -> Outcome {
    let worst = rows
        .iter()
        .map(|r| r.estimate - r.ruelle)
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(
        worst <= 0.05,
        format!("Ruelle inequality: max (KS estimate - Ruelle bound) = {worst:.4} over {} measures (<= 0.05)", rows.len()),
        1,
    )
}

fn criterion_6() -> Outcome {
    let cat = ToralAutomorphism::cat();
    let target = LOG_LAMBDA / 2.0 - 0.1;
    let mut parts = Vec::new();
    let mut pass = true;
    for n in [128usize, 256] {
        let (space, u, qp) = torus(n, 4);
        let ne = ehrenfest_time(&space, &cat, DEFAULT_EHRENFEST_DELTA);
        let eig = u.eigenstates(1).unwrap();
        let rates: Vec<f64> = (0..20)
            .map(|i| {
                let psi = eig.eigenvector(i * n / 20);
                let profile = max_norm_profile(&psi, &qp, &u, 2 * ne).unwrap();
                fit_decay_rate(&profile, ne, 2 * ne).unwrap()
            })
            .collect();
        let mean = rates.iter().sum::<f64>() / rates.len() as f64;
        pass &= mean >= target;
        parts.push(format!("N={n} (n_E={ne}) mean rate {mean:.4}"));
    }
    outcome(
        pass,
        format!(
            "norm decay, K=4, 20 eigenstates: {} (>= {target:.4})",
            parts.join(", ")
        ),
        600,
    )
}

fn criterion_7() -> Outcome {
    let cat = ToralAutomorphism::cat();
    let (_, u, qp) = torus(32, 2);
    let jac = CoarseJacobian::with_default_r(&cat, &ArcPartition::uniform(2).unwrap());
    let eig = u.eigenstates(1).unwrap();
    let mut worst_unit = f64::INFINITY;
    let mut worst_jac = f64::INFINITY;
    let mut exhaustive = true;
    for j in 0..32 {
        let psi = eig.eigenvector(j);
        let a = corollary_instance(&psi, &qp, &u, 3, &WeightScheme::Unit, 1).unwrap();
        let b =
            corollary_instance(&psi, &qp, &u, 3, &WeightScheme::Jacobian(jac.clone()), 1).unwrap();
        exhaustive &= a.pairs_evaluated == 64 && b.pairs_evaluated == 64;
        worst_unit = worst_unit.min(a.report.slack);
        worst_jac = worst_jac.min(b.report.slack);
    }
    outcome(
        exhaustive && worst_unit >= -SLACK_TOL && worst_jac >= -SLACK_TOL,
        format!(
            "corollary, K=2, N=32, n=3, all 32 eigenstates, 64 pairs each: min slack {worst_unit:.4} (unit weights), {worst_jac:.4} (Jacobian weights)"
        ),
        60,
    )
}

fn criterion_8() -> Outcome {
    let cat = ToralAutomorphism::cat();
    let jac = CoarseJacobian::with_default_r(&cat, &ArcPartition::uniform(4).unwrap());
    let scheme = WeightScheme::Jacobian(jac.clone());
    let mut means = Vec::new();
    for n in [64usize, 128, 256] {
        let (space, u, qp) = torus(n, 4);
        let eig = u.eigenstates(1).unwrap();
        let total: f64 = (0..space.dim())
            .map(|j| {
                subadditivity_check(
                    &eig.eigenvector(j),
                    &qp,
                    &u,
                    2,
                    3,
                    ehrenfest_time(&space, &cat, DEFAULT_EHRENFEST_DELTA),
                    &scheme,
                    Ordering::Reversed,
                )
                .unwrap()
            })
            .sum();
        means.push((n, total / n as f64));
    }
    let fitted = means[..2].iter().map(|m| m.1.abs()).fold(0.0, f64::max);
    let bounded = means.iter().all(|m| m.1.abs() <= fitted + 0.1);

    let p = ArcPartition::uniform(4).unwrap();
    let weigher = PolygonWeigher::default();
    let mut classical_worst = f64::NEG_INFINITY;
    let mix = InvariantMeasure::mixture(vec![
        (0.5, InvariantMeasure::Lebesgue),
        (0.5, InvariantMeasure::origin()),
    ]);
    for mu in [InvariantMeasure::Lebesgue, InvariantMeasure::origin(), mix] {
        let tables =
            cylinder_weights_by_depth(&mu, &cat, &p, 5, &weigher, DEFAULT_CYLINDER_CAP).unwrap();
        classical_worst =
            classical_worst.max(classical_subadditivity_defect(&tables, &jac, 2, 3).unwrap());
    }
    let listed: Vec<String> = means
        .iter()
        .map(|(n, r)| format!("N={n} R={r:.4}"))
        .collect();
    outcome(
        bounded && classical_worst <= 1e-9,
        format!(
            "subadditivity, n_o=2, n=3, eigenstate means: {} (|R| <= fitted {fitted:.4} + 0.1); classical max defect {classical_worst:.4} (<= 1e-9)",
            listed.join(", ")
        ),
        120,
    )
}

fn criterion_9() -> Outcome {
    let mut worst_identity = 0.0f64;
    for k in [2usize, 4, 8] {
        let sp =
            build_smooth_partition(k, 1.0 / k as f64, SMOOTH_WIDTH.min(0.25 / k as f64)).unwrap();
        for i in 0..10_000 {
            let x = i as f64 / 10_000.0;
            let s: f64 = sp.values(x).iter().map(|v| v * v).sum();
            worst_identity = worst_identity.max((s - 1.0).abs());
        }
    }
    let cat = ToralAutomorphism::cat();
    let (space, u, qp) = torus(64, 4);
    let ne = ehrenfest_time(&space, &cat, DEFAULT_EHRENFEST_DELTA);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_sum = 0.0f64;
    for _ in 0..100 {
        let psi = QuantumState::random(&space, &mut rng);
        for t in
            forward_weights_by_depth(psi.amplitudes(), &qp, &u, ne, DEFAULT_WEIGHT_CAP).unwrap()
        {
            worst_sum = worst_sum.max((t.total() - 1.0).abs());
        }
        for n in 1..=ne {
            let t = refined_weights(
                psi.amplitudes(),
                &qp,
                &u,
                n,
                Ordering::Reversed,
                DEFAULT_WEIGHT_CAP,
            )
            .unwrap();
            worst_sum = worst_sum.max((t.total() - 1.0).abs());
        }
    }
    outcome(
        worst_identity <= 1e-12 && worst_sum <= 1e-9,
        format!(
            "partition of unity: max |sum f_k^2 - 1| = {worst_identity:.2e} at 10^4 points (K = 2, 4, 8); max |sum |P_a psi|^2 - 1| = {worst_sum:.2e} for n <= {ne}, 100 states, N=64"
        ),
        60,
    )
}

fn criterion_10() -> Outcome {
    let cat = ToralAutomorphism::cat();
    let (space, u, qp) = torus(128, 4);
    let ne = ehrenfest_time(&space, &cat, DEFAULT_EHRENFEST_DELTA);
    let eig = u.eigenstates(1).unwrap();
    let picks = [0usize, 31, 64, 97, 127];
    let mut mean = vec![0.0; ne + 3];
    for &j in &picks {
        let curve = af_entropy_curve(StateRef::Pure(&eig.eigenvector(j)), &qp, &u, ne + 3).unwrap();
        for (m, c) in mean.iter_mut().zip(curve) {
            *m += c / picks.len() as f64;
        }
    }
    let early: Vec<(usize, f64)> = (1..ne).map(|n| (n, mean[n - 1])).collect();
    let late: Vec<(usize, f64)> = (ne + 1..=ne + 3).map(|n| (n, mean[n - 1])).collect();
    let (s_early, s_late) = (slope(&early), slope(&late));
    outcome(
        s_early > s_late,
        format!("AF saturation, N=128, K=4, n_E={ne}: slope over [1, {}] = {s_early:.4} > slope over [{}, {}] = {s_late:.4}", ne - 1, ne + 1, ne + 3),
        120,
    )
}

fn main() {
    let mut failures = 0;
    let mut report = |index: usize, run: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= o.budget;
        let pass = o.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {index:>2}: {} {} [{:.1} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            o.budget.as_secs()
        );
    };
    report(1, &criterion_1);
    report(2, &criterion_2);
    report(3, &criterion_3);
    let rows = OnceCell::new();
    report(4, &|| criterion_4(rows.get_or_init(ks_rows)));
    report(5, &|| criterion_5(rows.get_or_init(ks_rows)));
    report(6, &criterion_6);
    report(7, &criterion_7);
    report(8, &criterion_8);
    report(9, &criterion_9);
    report(10, &criterion_10);
    if failures > 0 {
        println!("acceptance: {failures} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all 10 criteria passed");
}
