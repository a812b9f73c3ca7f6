//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

use std::process::ExitCode;
use std::time::Instant;

use concurrence_witness::bounds::c_from_c_squared;
use concurrence_witness::concurrence::pure_concurrence_value;
use concurrence_witness::linalg::tensor;
use concurrence_witness::projectors::{pure_two_copy_expectation, trace_out_second_copy};
use concurrence_witness::states::{
    bell_state, random_density_with, random_local_unitary_with, random_pure_with, random_separable_with,
    rng_stream, werner_state, Side,
};
use concurrence_witness::{
    build_v, convex_roof_estimate, ensemble_inequality_check, optimize_witness, pure_pair_residual,
    simulate_expectation, two_copy_bound, witness_bound, witness_from_pure, wootters_concurrence, BellKind,
    BipartiteDims, ComplexMatrix, DensityMatrix, OptimizeOptions, RoofOptions, Variant, VariantChoice,
};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn dims(d1: usize, d2: usize) -> BipartiteDims {
    BipartiteDims::new(d1, d2).unwrap()
}

fn pure_tightness() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, d) in [dims(2, 2), dims(3, 3)].into_iter().enumerate() {
        let mut rng = rng_stream(1, k as u64);
        let v = build_v(d, Variant::A);
        for _ in 0..200 {
            let psi = random_pure_with(d, &mut rng);
            let lhs = 4.0 * pure_two_copy_expectation(&psi, &psi, &v).unwrap();
            let c = pure_concurrence_value(&psi);
            worst = worst.max((lhs - c * c).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max |4Tr((ψ⊗ψ)V_A) − c²| = {worst:.2e}"))
}

fn partial_trace_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, d) in [dims(2, 2), dims(2, 3)].into_iter().enumerate() {
        let mut rng = rng_stream(2, k as u64);
        let eye1 = ComplexMatrix::identity(d.d1);
        let eye2 = ComplexMatrix::identity(d.d2);
        for i in 0..100 {
            let sigma = random_density_with(d, 1 + i % d.total(), &mut rng).unwrap();
            let s = sigma.matrix();
            let expect_a = (s - &tensor(&eye1, &sigma.reduced(Side::Second))).scale(0.5);
            let expect_b = (s - &tensor(&sigma.reduced(Side::First), &eye2)).scale(0.5);
            let got_a = trace_out_second_copy(s, &build_v(d, Variant::A)).unwrap();
            let got_b = trace_out_second_copy(s, &build_v(d, Variant::B)).unwrap();
            worst = worst.max(got_a.max_abs_diff(&expect_a)).max(got_b.max_abs_diff(&expect_b));
        }
    }
    outcome(worst <= 1e-12, format!("max entry deviation over both variants = {worst:.2e}"))
}

fn werner_exactness() -> Outcome {
    let w = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A).unwrap();
    let (mut vs_formula, mut vs_wootters): (f64, f64) = (0.0, 0.0);
    for k in 4..=10 {
        let p = k as f64 / 10.0;
        let rho = werner_state(p).unwrap();
        let b = witness_bound(&rho, &w).unwrap();
        vs_formula = vs_formula.max((b - (3.0 * p - 1.0) / 2.0).abs());
        vs_wootters = vs_wootters.max((b - wootters_concurrence(&rho).unwrap().value).abs());
    }
    outcome(
        vs_formula <= 1e-10 && vs_wootters <= 1e-10,
        format!("max dev from (3p−1)/2 = {vs_formula:.2e}, from Wootters = {vs_wootters:.2e}"),
    )
}

fn soundness_sweep() -> Outcome {
    let d = BipartiteDims::qubits();
    let mut rng = rng_stream(4, 0);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut check = |bound: f64, exact: f64| {
        let gap = bound.max(0.0) - exact;
        worst = worst.max(gap);
        if gap > 1e-9 {
            violations += 1;
        }
    };
    for i in 0..500 {
        let rho = random_density_with(d, 1 + i % 4, &mut rng).unwrap();
        let exact = wootters_concurrence(&rho).unwrap().value;
        check(c_from_c_squared(two_copy_bound(&rho, VariantChoice::Best).unwrap()), exact);
        for _ in 0..20 {
            let phi = random_pure_with(d, &mut rng);
            for variant in Variant::ALL {
                check(witness_bound(&rho, &witness_from_pure(&phi, variant).unwrap()).unwrap(), exact);
            }
        }
        let opts = OptimizeOptions { seed: i as u64, ..Default::default() };
        check(optimize_witness(&rho, &opts).unwrap().bound, exact);
    }
    outcome(
        violations == 0,
        format!("{violations} violations, max (bound − Wootters) = {worst:.2e}"),
    )
}

fn separable_nonnegativity() -> Outcome {
    let d = BipartiteDims::qubits();
    let mut rng = rng_stream(5, 0);
    let mut witnesses = Vec::new();
    while witnesses.len() < 10 {
        let phi = random_pure_with(d, &mut rng);
        if pure_concurrence_value(&phi) > 1e-3 {
            let variant = Variant::ALL[witnesses.len() % 2];
            witnesses.push(witness_from_pure(&phi, variant).unwrap());
        }
    }
    let mut min = f64::INFINITY;
    for i in 0..1000 {
        let rho = random_separable_with(d, 1 + i % 4, &mut rng).unwrap();
        for w in &witnesses {
            min = min.min(-witness_bound(&rho, w).unwrap());
        }
    }
    outcome(min >= -1e-9, format!("min Tr(ρW) = {min:.3e}"))
}

fn pure_pair_inequality() -> Outcome {
    let mut min = f64::INFINITY;
    for (k, d) in [dims(2, 2), dims(3, 3)].into_iter().enumerate() {
        let mut rng = rng_stream(6, k as u64);
        for _ in 0..10_000 {
            let psi = random_pure_with(d, &mut rng);
            let phi = random_pure_with(d, &mut rng);
            for variant in Variant::ALL {
                min = min.min(pure_pair_residual(&psi, &phi, variant).unwrap());
            }
        }
    }
    outcome(min >= -1e-10, format!("min residual = {min:.3e}"))
}

fn ensemble_inequality() -> Outcome {
    let mut rng = rng_stream(7, 0);
    let mut violations = 0;
    let mut min_gap = f64::INFINITY;
    for i in 0..100 {
        let d = [dims(2, 2), dims(2, 3), dims(3, 3)][i % 3];
        let rho = random_density_with(d, 1 + i % d.total(), &mut rng).unwrap();
        let sigma = random_density_with(d, 1 + (i / 3) % d.total(), &mut rng).unwrap();
        let (rr, rs) = (rho.rank(), sigma.rank());
        for a in 0..3 {
            for b in 0..3 {
                let check = ensemble_inequality_check(&rho, &sigma, (rr + a, rs + b), 2, (i * 9 + a * 3 + b) as u64).unwrap();
                violations += check.violations;
                min_gap = min_gap.min(check.min_gap);
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations, min gap = {min_gap:.3e}"))
}

fn roof_agreement() -> Outcome {
    let mut rng = rng_stream(8, 0);
    let (mut low, mut high) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..50 {
        let rho = random_density_with(BipartiteDims::qubits(), 2, &mut rng).unwrap();
        let exact = wootters_concurrence(&rho).unwrap().value;
        let est = convex_roof_estimate(&rho, &RoofOptions { seed: i, ..Default::default() }).unwrap().value;
        low = low.min(est - exact);
        high = high.max(est - exact);
    }
    outcome(
        low >= -1e-6 && high <= 1e-3,
        format!("estimate − Wootters in [{low:.2e}, {high:.2e}]"),
    )
}

fn optimizer_recovery() -> Outcome {
    let werner = optimize_witness(&werner_state(0.9).unwrap(), &OptimizeOptions { seed: 9, ..Default::default() })
        .unwrap()
        .bound;
    let mut bell_dev: f64 = 0.0;
    for kind in [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus] {
        let rho = DensityMatrix::from_pure(&bell_state(kind));
        let b = optimize_witness(&rho, &OptimizeOptions { seed: 9, ..Default::default() }).unwrap().bound;
        bell_dev = bell_dev.max((b - 1.0).abs());
    }
    outcome(
        (0.85 - 1e-6..=0.85 + 1e-9).contains(&werner) && bell_dev <= 1e-6,
        format!("werner(0.9) bound = {werner:.12}, max Bell deviation = {bell_dev:.2e}"),
    )
}

fn shot_statistics() -> Outcome {
    let rho = werner_state(0.9).unwrap();
    let w = witness_from_pure(&bell_state(BellKind::PsiMinus), Variant::A).unwrap();
    let big = simulate_expectation(&rho, w.operator(), 100_000, 10).unwrap();
    let z = (big.mean + 0.85).abs() / big.std_error;
    let ratio = (0..20u64)
        .map(|s| {
            let small = simulate_expectation(&rho, w.operator(), 10_000, 1000 + s).unwrap();
            let large = simulate_expectation(&rho, w.operator(), 40_000, 2000 + s).unwrap();
            large.std_error / small.std_error
        })
        .sum::<f64>()
        / 20.0;
    outcome(
        z <= 5.0 && (0.4..=0.6).contains(&ratio),
        format!("mean = {:.5} ({z:.2} std errors from −0.85), std-error ratio = {ratio:.4}", big.mean),
    )
}

fn lu_invariance() -> Outcome {
    let mut rng = rng_stream(11, 0);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let d = [dims(2, 2), dims(2, 3), dims(3, 3)][i % 3];
        let rho = random_density_with(d, 1 + i % d.total(), &mut rng).unwrap();
        let u = random_local_unitary_with(d, &mut rng);
        let moved = rho.conjugated(&u).unwrap();
        for variant in Variant::ALL {
            let before = two_copy_bound(&rho, VariantChoice::One(variant)).unwrap();
            let after = two_copy_bound(&moved, VariantChoice::One(variant)).unwrap();
            worst = worst.max((before - after).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max change = {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("pure-state tightness", pure_tightness),
        ("partial-trace identity", partial_trace_identity),
        ("Werner-family exactness", werner_exactness),
        ("soundness sweep", soundness_sweep),
        ("separable nonnegativity", separable_nonnegativity),
        ("pure-pair inequality", pure_pair_inequality),
        ("ensemble inequality", ensemble_inequality),
        ("convex-roof agreement", roof_agreement),
        ("optimizer recovery", optimizer_recovery),
        ("shot statistics", shot_statistics),
        ("local-unitary invariance", lu_invariance),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("[{status}] {:>2}. {name}: {} ({:.1}s)", k + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
