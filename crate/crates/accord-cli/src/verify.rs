//! Verification suites behind `accord verify`: medium-size randomized
//! re-checks of the bounds, inequalities, and algebraic identities. Exit
//! code 4 on any violation.

use accord_core::exact::{accord_two_qubit, omcp_classical, omcp_pure, omcp_two_qubit};
use accord_core::game::{simulate_game, GameConfig};
use accord_core::linalg::{c, cr, CMatrix, CVector};
use accord_core::measures::{
    concurrence, discord_numerical_side_min, j_function, singlet_fraction_pure, DiscordConfig,
};
use accord_core::optimizer::{
    haar_random_unitary, hadamard_trace_identity, mcp, mcp_pure_fast, mcp_pure_trace_form,
    omcp_numerical, OptimizerConfig,
};
use accord_core::qstate::{
    make_max_entangled, tensor_product, validate_density, DensityMatrix, PureState, SchmidtForm,
};
use accord_core::sampling::{
    random_bell_diagonal, random_two_qubit_mixed, zero_accord_entangled_search, RandomEnsemble,
};
use accord_core::streams::derive_rng;
use rand::Rng;
use rayon::prelude::*;
use std::process::ExitCode;

use crate::CliError;

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn random_coeffs<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut cs: Vec<f64> = (0..d).map(|_| rng.random::<f64>() + 1e-9).collect();
    let norm = cs.iter().map(|x| x * x).sum::<f64>().sqrt();
    cs.iter_mut().for_each(|x| *x /= norm);
    cs.sort_by(|a, b| b.total_cmp(a));
    cs
}

fn scrambled_pure(coeffs: &[f64], rng: &mut impl Rng) -> DensityMatrix {
    let d = coeffs.len();
    let mut amps = CVector::zeros(d * d);
    for (i, &ci) in coeffs.iter().enumerate() {
        amps[i * d + i] = cr(ci);
    }
    let ua = haar_random_unitary(d, rng);
    let ub = haar_random_unitary(d, rng);
    PureState::new(amps, d)
        .unwrap()
        .density()
        .apply_local_unitaries(&ua, &ub)
        .unwrap()
}

fn suite_bounds(seed: u64) -> Check {
    let mut rng = derive_rng(seed, &[0xB0]);
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for d in 2..=4 {
        for _ in 0..20 {
            let coeffs = random_coeffs(d, &mut rng);
            let v = omcp_pure(&SchmidtForm::from_coeffs(coeffs).unwrap()).value;
            worst = worst.min(v - 1.0 / d as f64).min(1.0 - v);
            ok &= v >= 1.0 / d as f64 - 1e-6 && v <= 1.0 + 1e-9;
        }
        let v = omcp_classical(d).value;
        ok &= (v - 1.0 / d as f64).abs() < 1e-15;
    }
    for _ in 0..200 {
        let rho = random_bell_diagonal(&mut rng);
        let v = omcp_two_qubit(&rho).unwrap().value;
        worst = worst.min(v - 0.5).min(1.0 - v);
        ok &= (0.5 - 1e-9..=1.0 + 1e-9).contains(&v);
    }
    Check {
        name: "bounds",
        passed: ok,
        detail: format!("min margin to [1/d, 1] = {worst:.2e}"),
    }
}

fn suite_pure(seed: u64) -> Check {
    let worst = (0..10u64)
        .into_par_iter()
        .map(|k| {
            let d = 2 + (k % 2) as usize;
            let mut rng = derive_rng(seed, &[0xB1, k]);
            let coeffs = random_coeffs(d, &mut rng);
            let expected = coeffs.iter().sum::<f64>().powi(2) / d as f64;
            let rho = scrambled_pure(&coeffs, &mut rng);
            let cfg = OptimizerConfig::quick(seed ^ k);
            match omcp_numerical(&rho, &cfg) {
                Ok(r) => (r.value - expected).abs(),
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max);
    Check {
        name: "pure",
        passed: worst <= 1e-4,
        detail: format!("max |numerical - closed| = {worst:.2e}"),
    }
}

fn suite_two_qubit(seed: u64) -> Check {
    let worst = (0..20u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = derive_rng(seed, &[0xB2, k]);
            let rho = random_two_qubit_mixed(&mut rng, RandomEnsemble::HaarComplex);
            let closed = omcp_two_qubit(&rho).unwrap().value;
            let cfg = OptimizerConfig::quick(seed ^ 0xB2 ^ k);
            match omcp_numerical(&rho, &cfg) {
                Ok(r) => (r.value - closed).abs(),
                Err(_) => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max);
    Check {
        name: "two-qubit",
        passed: worst <= 1e-4,
        detail: format!("max |numerical - (1+s)/2| = {worst:.2e}"),
    }
}

fn suite_classical(seed: u64) -> Check {
    let mut rng = derive_rng(seed, &[0xB3]);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let va = haar_random_unitary(2, &mut rng);
        let vb = haar_random_unitary(2, &mut rng);
        let mut w = [0.0f64; 4];
        let mut total = 0.0;
        for slot in &mut w {
            *slot = rng.random::<f64>();
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
    Check {
        name: "classical",
        passed: worst <= 1e-6,
        detail: format!("max accord on classical states = {worst:.2e}"),
    }
}

fn suite_bell_inequalities(seed: u64) -> Check {
    let results: Vec<(f64, f64)> = (0..500u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = derive_rng(seed, &[0xB4, k]);
            let rho = random_bell_diagonal(&mut rng);
            let accord = accord_two_qubit(&rho).unwrap();
            let conc = concurrence(&rho).unwrap();
            let cfg = DiscordConfig {
                restarts: 4,
                seed: seed ^ k,
                ..DiscordConfig::default()
            };
            let discord = discord_numerical_side_min(&rho, &cfg)
                .map(|r| r.value)
                .unwrap_or(f64::NEG_INFINITY);
            (conc - accord, j_function(accord.clamp(0.0, 1.0)) - discord)
        })
        .collect();
    let bad = results.iter().filter(|r| r.0 > 1e-9 || r.1 > 1e-6).count();
    Check {
        name: "bell-inequalities",
        passed: bad == 0,
        detail: format!("violations = {bad} over 500 Bell-diagonal states"),
    }
}

fn suite_general_bound(seed: u64) -> Check {
    let mut bad = 0usize;
    for (i, family) in [RandomEnsemble::HaarComplex, RandomEnsemble::RealGaussian]
        .into_iter()
        .enumerate()
    {
        bad += (0..100u64)
            .into_par_iter()
            .filter(|&k| {
                let mut rng = derive_rng(seed, &[0xB5, i as u64, k]);
                let rho = random_two_qubit_mixed(&mut rng, family);
                let accord = accord_two_qubit(&rho).unwrap();
                let cfg = DiscordConfig {
                    restarts: 4,
                    seed: seed ^ k,
                    ..DiscordConfig::default()
                };
                match discord_numerical_side_min(&rho, &cfg) {
                    Ok(r) => j_function(accord.clamp(0.0, 1.0)) > r.value + 1e-6,
                    Err(_) => true,
                }
            })
            .count();
    }
    Check {
        name: "general-bound",
        passed: bad == 0,
        detail: format!("violations = {bad} over 200 general states"),
    }
}

fn suite_identities(seed: u64) -> Check {
    let mut rng = derive_rng(seed, &[0xB6]);
    let mut worst = 0.0f64;
    for &d in &[2usize, 3, 5] {
        for _ in 0..30 {
            let a = CMatrix::from_fn(d, d, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let b = CMatrix::from_fn(d, d, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let (lhs, rhs) = hadamard_trace_identity(&a, &b);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    for d in 2..=4 {
        for _ in 0..7 {
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
            worst = worst.max((full - fast).abs()).max((fast - trace).abs());
            let s = SchmidtForm::from_coeffs(coeffs).unwrap();
            if singlet_fraction_pure(&s) != omcp_pure(&s).value {
                worst = f64::INFINITY;
            }
        }
    }
    Check {
        name: "identities",
        passed: worst <= 1e-12,
        detail: format!("max identity gap = {worst:.2e}"),
    }
}

fn suite_zero_accord(seed: u64) -> Check {
    let fixture = accord_core::qstate::appendix_d_state();
    let accord = accord_two_qubit(&fixture).unwrap();
    let conc = concurrence(&fixture).unwrap();
    let mut rng = derive_rng(seed, &[0xB7]);
    let search = zero_accord_entangled_search(&mut rng, 10_000);
    let passed = accord <= 1e-6 && conc > 0.0 && search.is_ok();
    Check {
        name: "zero-accord",
        passed,
        detail: format!(
            "fixture accord {accord:.2e}, concurrence {conc:.4}, search {}",
            match &search {
                Ok((_, c)) => format!("found concurrence {c:.3}"),
                Err(e) => e.to_string(),
            }
        ),
    }
}

fn suite_game(seed: u64) -> Check {
    let mixed = validate_density(CMatrix::identity(4, 4).scale(0.25), 2).unwrap();
    let cfg = GameConfig {
        n_a: 64,
        n_b: 64,
        shots: 0,
        seed,
    };
    let noise = simulate_game(&mixed, &cfg).unwrap().estimate;
    let phi = make_max_entangled(2).density();
    let ent = simulate_game(&phi, &cfg).unwrap().estimate;
    let passed = (noise - 0.5).abs() <= 1e-12 && ent >= 0.9;
    Check {
        name: "game",
        passed,
        detail: format!("noise estimate {noise:.12}, max-entangled estimate {ent:.4}"),
    }
}

pub fn cmd_verify(suite: &str, seed: u64) -> Result<ExitCode, CliError> {
    let all: Vec<(&str, fn(u64) -> Check)> = vec![
        ("bounds", suite_bounds),
        ("pure", suite_pure),
        ("two-qubit", suite_two_qubit),
        ("classical", suite_classical),
        ("bell-inequalities", suite_bell_inequalities),
        ("general-bound", suite_general_bound),
        ("identities", suite_identities),
        ("zero-accord", suite_zero_accord),
        ("game", suite_game),
    ];
    let selected: Vec<_> = if suite == "all" {
        all
    } else {
        let found: Vec<_> = all.into_iter().filter(|(name, _)| *name == suite).collect();
        if found.is_empty() {
            eprintln!(
                "unknown suite {suite:?}; available: bounds, pure, two-qubit, classical, bell-inequalities, general-bound, identities, zero-accord, game, all"
            );
            return Ok(ExitCode::from(2));
        }
        found
    };
    let mut failures = 0;
    for (_, run) in selected {
        let check = run(seed);
        println!(
            "{} {} | {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
        if !check.passed {
            failures += 1;
        }
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}
