//! Acceptance suite: the quantitative checks the library must satisfy, one
//! line of output per criterion. Run with
//! `cargo test -p accord-core --test acceptance -- --nocapture` to see the
//! report; any failed criterion fails the test with details.

use accord_core::exact::{accord_from_omcp, accord_two_qubit, omcp_isotropic, omcp_two_qubit};
use accord_core::game::{simulate_game, GameConfig};
use accord_core::linalg::{c, cr, CMatrix, CVector, ZERO};
use accord_core::measures::{
    concurrence, discord_isotropic, discord_numerical_side_min, j_function, singlet_fraction_pure,
    DiscordConfig,
};
use accord_core::optimizer::{
    haar_random_unitary, hadamard_trace_identity, mcp, mcp_pure_fast, mcp_pure_trace_form,
    omcp_numerical, OptimizerConfig,
};
use accord_core::qstate::{
    appendix_d_state, make_bell_diagonal, make_isotropic, make_max_entangled, tensor_product,
    validate_density, DensityMatrix, PureState, SchmidtForm,
};
use accord_core::sampling::{
    random_bell_diagonal, random_two_qubit_mixed, zero_accord_entangled_search, RandomEnsemble,
};
use accord_core::streams::derive_rng;
use rand::Rng;
use rayon::prelude::*;

const MASTER_SEED: u64 = 0;

struct Criterion {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn random_coeffs<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut cs: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let norm = cs.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cs.iter_mut().for_each(|x| *x /= norm);
            cs.sort_by(|a, b| b.total_cmp(a));
            return cs;
        }
    }
}

fn scrambled_pure_density(coeffs: &[f64], rng: &mut impl Rng) -> DensityMatrix {
    let d = coeffs.len();
    let mut amps = CVector::zeros(d * d);
    for (i, &ci) in coeffs.iter().enumerate() {
        amps[i * d + i] = cr(ci);
    }
    let psi = PureState::new(amps, d).unwrap();
    let ua = haar_random_unitary(d, rng);
    let ub = haar_random_unitary(d, rng);
    psi.density().apply_local_unitaries(&ua, &ub).unwrap()
}

/// Pure-state theorem: the numerical minimax agrees with `(sum c)^2 / d`
/// on 50 random Schmidt vectors at each local dimension 2, 3 and 4.
fn criterion_1(omcp_values: &mut Vec<(f64, usize)>) -> Criterion {
    let mut worst = 0.0f64;
    for d in 2..=4usize {
        let errs: Vec<(f64, f64)> = (0..50u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = derive_rng(MASTER_SEED, &[0xC1, d as u64, k]);
                let coeffs = random_coeffs(d, &mut rng);
                let expected = coeffs.iter().sum::<f64>().powi(2) / d as f64;
                let rho = scrambled_pure_density(&coeffs, &mut rng);
                let cfg = OptimizerConfig::quick(MASTER_SEED ^ (d as u64) << 8 ^ k);
                match omcp_numerical(&rho, &cfg) {
                    Ok(r) => (r.value, (r.value - expected).abs()),
                    Err(_) => (f64::NAN, f64::INFINITY),
                }
            })
            .collect();
        for (v, e) in errs {
            omcp_values.push((v, d));
            worst = worst.max(e);
        }
    }
    Criterion {
        name: "1 pure-state theorem (150 states, d in {2,3,4})",
        passed: worst <= 1e-4,
        detail: format!("max |numerical - closed| = {worst:.2e} (tol 1e-4)"),
    }
}

/// Two-qubit closed form: numerical minimax against `(1 + s)/2` with `s`
/// the smallest singular value of the correlation matrix, on 200 states.
fn criterion_2(omcp_values: &mut Vec<(f64, usize)>) -> Criterion {
    let errs: Vec<(f64, f64)> = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = derive_rng(MASTER_SEED, &[0xC2, k]);
            let rho = random_two_qubit_mixed(&mut rng, RandomEnsemble::HaarComplex);
            let closed = omcp_two_qubit(&rho).unwrap().value;
            let cfg = OptimizerConfig::quick(MASTER_SEED ^ 0xC200 ^ k);
            match omcp_numerical(&rho, &cfg) {
                Ok(r) => (r.value, (r.value - closed).abs()),
                Err(_) => (f64::NAN, f64::INFINITY),
            }
        })
        .collect();
    let mut worst = 0.0f64;
    for (v, e) in errs {
        omcp_values.push((v, 2));
        worst = worst.max(e);
    }
    Criterion {
        name: "2 two-qubit closed form (200 mixed states)",
        passed: worst <= 1e-4,
        detail: format!("max |numerical - (1+s)/2| = {worst:.2e} (tol 1e-4)"),
    }
}

/// Lower and upper bounds on every value produced in criteria 1 and 2 plus
/// a thousand Bell-diagonal draws.
fn criterion_3(omcp_values: &[(f64, usize)]) -> Criterion {
    let mut all = omcp_values.to_vec();
    let mut rng = derive_rng(MASTER_SEED, &[0xC3]);
    for _ in 0..1000 {
        let rho = random_bell_diagonal(&mut rng);
        all.push((omcp_two_qubit(&rho).unwrap().value, 2));
    }
    let mut low_margin = f64::INFINITY;
    let mut high_margin = f64::INFINITY;
    let mut ok = true;
    for &(v, d) in &all {
        let lo = 1.0 / d as f64;
        low_margin = low_margin.min(v - lo);
        high_margin = high_margin.min(1.0 - v);
        if v < lo - 1e-6 || v > 1.0 + 1e-9 {
            ok = false;
        }
    }
    Criterion {
        name: "3 bounds 1/d <= OMCP <= 1 (criteria 1-2 states + 1000 Bell-diagonal)",
        passed: ok,
        detail: format!(
            "min margin above 1/d = {low_margin:.2e}, below 1 = {high_margin:.2e} ({} values)",
            all.len()
        ),
    }
}

/// States diagonal in random orthogonal product bases have zero accord.
fn criterion_4() -> Criterion {
    let mut rng = derive_rng(MASTER_SEED, &[0xC4]);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let va = haar_random_unitary(2, &mut rng);
        let vb = haar_random_unitary(2, &mut rng);
        let mut w = [0.0f64; 4];
        let mut total = 0.0;
        for slot in &mut w {
            *slot = -(1.0 - rng.random::<f64>()).ln();
            total += *slot;
        }
        let mut mat = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                let pa = va.matrix().column(i) * va.matrix().column(i).adjoint();
                let pb = vb.matrix().column(j) * vb.matrix().column(j).adjoint();
                mat += tensor_product(&pa.into(), &pb.into()).scale(w[i * 2 + j] / total);
            }
        }
        let rho = validate_density(mat, 2).unwrap();
        worst = worst.max(accord_two_qubit(&rho).unwrap());
    }
    Criterion {
        name: "4 classical states sit at random chance (100 states)",
        passed: worst <= 1e-6,
        detail: format!("max accord = {worst:.2e} (tol 1e-6)"),
    }
}

/// The isotropic curve: accord endpoints, the CHSH crossing, and agreement
/// between the numerical discord and `I - J(accord)` on a 21-point grid.
fn criterion_5() -> Criterion {
    let mut ok = true;
    let mut notes = Vec::new();

    let accord_at = |p: f64| accord_from_omcp(omcp_isotropic(p, 2).unwrap().value, 2);
    for (p, expected) in [(0.0, 1.0 / 3.0), (0.25, 0.0), (1.0, 1.0)] {
        let got = accord_at(p);
        if (got - expected).abs() > 1e-9 {
            ok = false;
            notes.push(format!("accord({p}) = {got} != {expected}"));
        }
    }

    // CHSH threshold by bisection of M(p) - 1.
    let m_at = |p: f64| {
        accord_core::measures::chsh_parameter(&make_isotropic(p, 2).unwrap()).unwrap() - 1.0
    };
    let (mut lo, mut hi) = (0.5f64, 1.0f64);
    assert!(m_at(lo) < 0.0 && m_at(hi) > 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if m_at(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let crossing = 0.5 * (lo + hi);
    let expected_crossing = (1.0 + 3.0 / 2.0_f64.sqrt()) / 4.0;
    if (crossing - expected_crossing).abs() > 1e-9 {
        ok = false;
        notes.push(format!("CHSH crossing {crossing} != {expected_crossing}"));
    }

    // Discord grid.
    let mut worst_discord = 0.0f64;
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let closed = discord_isotropic(p).unwrap();
        let cfg = DiscordConfig {
            restarts: 8,
            seed: MASTER_SEED ^ k,
            ..DiscordConfig::default()
        };
        let numerical = discord_numerical_side_min(&make_isotropic(p, 2).unwrap(), &cfg)
            .unwrap()
            .value;
        worst_discord = worst_discord.max((closed - numerical).abs());
    }
    if worst_discord > 1e-4 {
        ok = false;
        notes.push(format!("discord grid error {worst_discord:.2e}"));
    }

    Criterion {
        name: "5 isotropic curve (endpoints, CHSH crossing, 21-point discord grid)",
        passed: ok,
        detail: if notes.is_empty() {
            format!(
                "endpoints exact, crossing at (1+3/sqrt2)/4, max discord gap {worst_discord:.2e}"
            )
        } else {
            notes.join("; ")
        },
    }
}

/// Bell-diagonal inequalities over ten thousand flat-simplex draws.
fn criterion_6() -> Criterion {
    let results: Vec<(f64, f64)> = (0..10_000u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = derive_rng(MASTER_SEED, &[0xC6, k]);
            let rho = random_bell_diagonal(&mut rng);
            let accord = accord_two_qubit(&rho).unwrap();
            let conc = concurrence(&rho).unwrap();
            let cfg = DiscordConfig {
                restarts: 4,
                seed: MASTER_SEED ^ k,
                ..DiscordConfig::default()
            };
            let discord = discord_numerical_side_min(&rho, &cfg).unwrap().value;
            (conc - accord, j_function(accord.clamp(0.0, 1.0)) - discord)
        })
        .collect();
    let worst_conc = results
        .iter()
        .map(|r| r.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_j = results
        .iter()
        .map(|r| r.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let violations = results.iter().filter(|r| r.0 > 1e-9 || r.1 > 1e-6).count();
    Criterion {
        name: "6 Bell-diagonal inequalities (10^4 states)",
        passed: violations == 0,
        detail: format!(
            "violations = {violations}; max (C - A) = {worst_conc:.2e}, max (J(A) - D) = {worst_j:.2e}"
        ),
    }
}

/// The discord bound on general two-qubit states from both ensembles, plus
/// the existence of the concurrence-above-accord regime.
fn criterion_7() -> Criterion {
    let mut worst_j = f64::NEG_INFINITY;
    let mut violations = 0usize;
    let mut hidden = 0usize;
    for (fam_idx, family) in [RandomEnsemble::HaarComplex, RandomEnsemble::RealGaussian]
        .into_iter()
        .enumerate()
    {
        let results: Vec<(f64, bool)> = (0..1000u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = derive_rng(MASTER_SEED, &[0xC7, fam_idx as u64, k]);
                let rho = random_two_qubit_mixed(&mut rng, family);
                let accord = accord_two_qubit(&rho).unwrap();
                let conc = concurrence(&rho).unwrap();
                let cfg = DiscordConfig {
                    restarts: 4,
                    seed: MASTER_SEED ^ (fam_idx as u64) << 32 ^ k,
                    ..DiscordConfig::default()
                };
                let discord = discord_numerical_side_min(&rho, &cfg).unwrap().value;
                (
                    j_function(accord.clamp(0.0, 1.0)) - discord,
                    conc > accord + 1e-9,
                )
            })
            .collect();
        for (gap, is_hidden) in results {
            worst_j = worst_j.max(gap);
            if gap > 1e-6 {
                violations += 1;
            }
            if is_hidden {
                hidden += 1;
            }
        }
    }
    // The constructed reference state also exhibits the regime.
    let fixture = appendix_d_state();
    if concurrence(&fixture).unwrap() > accord_two_qubit(&fixture).unwrap() {
        hidden += 1;
    }
    Criterion {
        name: "7 general two-qubit discord bound (2 x 10^3 states)",
        passed: violations == 0 && hidden > 0,
        detail: format!(
            "violations = {violations}; max (J(A) - D) = {worst_j:.2e}; concurrence > accord on {hidden} states"
        ),
    }
}

/// The reference zero-accord entangled state, via both evaluation paths,
/// and the random search that generates such states.
fn criterion_8() -> Criterion {
    let rho = appendix_d_state();
    let svd_accord = accord_two_qubit(&rho).unwrap();
    let cfg = OptimizerConfig::with_seed(MASTER_SEED);
    let numerical = omcp_numerical(&rho, &cfg).unwrap();
    let numerical_accord = accord_from_omcp(numerical.value, 2);
    let conc = concurrence(&rho).unwrap();
    let mut rng = derive_rng(MASTER_SEED, &[0xC8]);
    let search = zero_accord_entangled_search(&mut rng, 10_000);
    let passed = svd_accord <= 1e-6 && numerical_accord <= 1e-6 && conc > 0.0 && search.is_ok();
    let search_note = match &search {
        Ok((_, c)) => format!("search found concurrence {c:.3}"),
        Err(e) => format!("search failed: {e}"),
    };
    Criterion {
        name: "8 zero-accord entanglement (fixture via both paths + search)",
        passed,
        detail: format!(
            "accord: svd {svd_accord:.2e}, numerical {numerical_accord:.2e}; concurrence {conc:.4}; {search_note}"
        ),
    }
}

/// Algebraic identity suite: the Hadamard trace identity, the agreement of
/// the three coincidence-probability forms, and the singlet fraction being
/// the pure OMCP verbatim.
fn criterion_9() -> Criterion {
    let mut worst_hadamard = 0.0f64;
    let mut rng = derive_rng(MASTER_SEED, &[0xC9]);
    for &d in &[2usize, 3, 5] {
        for _ in 0..100 {
            let a = CMatrix::from_fn(d, d, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let b = CMatrix::from_fn(d, d, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let (lhs, rhs) = hadamard_trace_identity(&a, &b);
            worst_hadamard = worst_hadamard.max((lhs - rhs).norm());
        }
    }

    let mut worst_forms = 0.0f64;
    for k in 0..50u64 {
        let d = 2 + (k % 3) as usize;
        let mut rng = derive_rng(MASTER_SEED, &[0xC9, 2, k]);
        let coeffs = random_coeffs(d, &mut rng);
        let ua = haar_random_unitary(d, &mut rng);
        let ub = haar_random_unitary(d, &mut rng);
        let mut amps = CVector::zeros(d * d);
        for (i, &ci) in coeffs.iter().enumerate() {
            amps[i * d + i] = cr(ci);
        }
        let rho = PureState::new(amps, d).unwrap().density();
        let full = mcp(&rho, &ua, &ub).unwrap();
        let fast = mcp_pure_fast(&coeffs, &ua, &ub);
        let trace = mcp_pure_trace_form(&coeffs, &ua, &ub);
        worst_forms = worst_forms.max((full - fast).abs().max((fast - trace).abs()));
    }

    let mut exact_match = true;
    for k in 0..20u64 {
        let d = 2 + (k % 3) as usize;
        let mut rng = derive_rng(MASTER_SEED, &[0xC9, 3, k]);
        let s = SchmidtForm::from_coeffs(random_coeffs(d, &mut rng)).unwrap();
        if singlet_fraction_pure(&s) != accord_core::exact::omcp_pure(&s).value {
            exact_match = false;
        }
    }

    Criterion {
        name: "9 identity suite (Hadamard lemma, three MCP forms, singlet fraction)",
        passed: worst_hadamard <= 1e-12 && worst_forms <= 1e-12 && exact_match,
        detail: format!(
            "hadamard gap {worst_hadamard:.2e}, form gap {worst_forms:.2e}, singlet fraction exact: {exact_match}"
        ),
    }
}

/// Game convergence in exact-probability mode at 256 x 256 unitaries.
fn criterion_10() -> Criterion {
    let phi = make_max_entangled(2).density();
    let cfg = GameConfig {
        n_b: 256,
        n_a: 256,
        shots: 0,
        seed: MASTER_SEED,
    };
    let ent = simulate_game(&phi, &cfg).unwrap();

    let mixed = validate_density(CMatrix::identity(4, 4).scale(0.25), 2).unwrap();
    let noise = simulate_game(&mixed, &cfg).unwrap();

    let ent_ok = (ent.estimate - 1.0).abs() <= 0.05;
    let noise_ok = (noise.estimate - 0.5).abs() <= 1e-12;
    Criterion {
        name: "10 game convergence (exact mode, 256 x 256)",
        passed: ent_ok && noise_ok,
        detail: format!(
            "max-entangled estimate {:.4} (within 0.05 of 1: {ent_ok}), noise estimate {:.12} (within 1e-12 of 1/2: {noise_ok})",
            ent.estimate, noise.estimate
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let started = std::time::Instant::now();
    let mut omcp_values = Vec::new();
    let results = vec![
        criterion_1(&mut omcp_values),
        criterion_2(&mut omcp_values),
        criterion_3(&omcp_values),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    let mut failures = Vec::new();
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {} | {}", r.name, r.detail);
        if !r.passed {
            failures.push(format!("{}: {}", r.name, r.detail));
        }
    }
    println!(
        "acceptance suite finished in {:.1} s",
        started.elapsed().as_secs_f64()
    );
    assert!(
        failures.is_empty(),
        "failed criteria:\n{}",
        failures.join("\n")
    );
}
