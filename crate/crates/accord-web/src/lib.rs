//! Browser bindings for the accord library. Each export returns a JSON
//! string so the page needs no framework, just `JSON.parse`.
//!
//! Build with `wasm-pack build --target web crates/accord-web` and serve
//! the `static/` page next to the generated `pkg/` directory.

use accord_core::exact::{accord_from_omcp, accord_two_qubit, omcp_isotropic};
use accord_core::measures::{
    chsh_parameter, concurrence, discord_isotropic, discord_numerical_side_min, j_function,
    mutual_information, singlet_fraction_numerical, DiscordConfig,
};
use accord_core::qstate::{bloch_decompose, make_bell_diagonal, make_isotropic, DensityMatrix};
use accord_core::sampling::{random_bell_diagonal, random_two_qubit_mixed, RandomEnsemble};
use accord_core::streams::derive_rng;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn measures_of(rho: &DensityMatrix, seed: u64) -> serde_json::Value {
    let accord = accord_two_qubit(rho).expect("two-qubit state");
    let conc = concurrence(rho).expect("two-qubit state");
    let cfg = DiscordConfig {
        restarts: 6,
        seed,
        ..DiscordConfig::default()
    };
    let discord = discord_numerical_side_min(rho, &cfg)
        .map(|r| r.value)
        .unwrap_or(f64::NAN);
    let chsh = chsh_parameter(rho).expect("two-qubit state");
    json!({
        "accord": accord,
        "concurrence": conc,
        "discord": discord,
        "j_of_accord": j_function(accord.clamp(0.0, 1.0)),
        "mutual_information": mutual_information(rho),
        "chsh": chsh,
        "chsh_violated": chsh > 1.0,
    })
}

/// Measures along the d = 2 isotropic family on a `steps`-point grid.
#[wasm_bindgen]
pub fn isotropic_curve(steps: u32) -> String {
    let steps = steps.clamp(2, 400);
    let mut rows = Vec::with_capacity(steps as usize);
    for k in 0..steps {
        let p = k as f64 / (steps - 1) as f64;
        let rho = make_isotropic(p, 2).expect("p in range");
        let accord = accord_from_omcp(omcp_isotropic(p, 2).expect("p in range").value, 2);
        let singlet = singlet_fraction_numerical(&rho, 4, k as u64)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        let chsh = chsh_parameter(&rho).expect("two-qubit state");
        rows.push(json!({
            "p": p,
            "accord": accord,
            "concurrence": concurrence(&rho).expect("two-qubit state"),
            "singlet_fraction": singlet,
            "discord": discord_isotropic(p).expect("p in range"),
            "chsh": chsh,
            "chsh_violated": chsh > 1.0,
        }));
    }
    serde_json::Value::Array(rows).to_string()
}

/// All measures for the Bell-diagonal state with the given (unnormalized,
/// nonnegative) weights in the order Phi+, Phi-, Psi+, Psi-.
#[wasm_bindgen]
pub fn bell_diagonal_measures(w1: f64, w2: f64, w3: f64, w4: f64) -> String {
    let raw = [w1.max(0.0), w2.max(0.0), w3.max(0.0), w4.max(0.0)];
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return json!({ "error": "weights must not all vanish" }).to_string();
    }
    let weights = [
        raw[0] / total,
        raw[1] / total,
        raw[2] / total,
        raw[3] / total,
    ];
    let rho = make_bell_diagonal(&weights).expect("normalized weights");
    let b = bloch_decompose(&rho).expect("two-qubit state");
    let mut report = measures_of(&rho, 0);
    report["weights"] = json!(weights);
    report["t_diagonal"] = json!([b.t[(0, 0)], b.t[(1, 1)], b.t[(2, 2)]]);
    report.to_string()
}

/// Random two-qubit states from one of the sampled families, with the
/// measures needed for the accord/concurrence and accord/discord scatter
/// plots.
#[wasm_bindgen]
pub fn scatter(family: &str, count: u32, seed: u64) -> String {
    let count = count.clamp(1, 5000);
    let mut rows = Vec::with_capacity(count as usize);
    for k in 0..count as u64 {
        let mut rng = derive_rng(seed, &[0x3E6, k]);
        let rho = match family {
            "bell_diagonal" => random_bell_diagonal(&mut rng),
            "general_ii" => random_two_qubit_mixed(&mut rng, RandomEnsemble::RealGaussian),
            _ => random_two_qubit_mixed(&mut rng, RandomEnsemble::HaarComplex),
        };
        rows.push(measures_of(&rho, seed ^ k));
    }
    serde_json::Value::Array(rows).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_curve_endpoints_are_exact() {
        let rows: serde_json::Value =
            serde_json::from_str(&isotropic_curve(5)).expect("valid json");
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), 5);
        assert!((rows[0]["accord"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((rows[1]["accord"].as_f64().unwrap()).abs() < 1e-12);
        assert!((rows[4]["accord"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rows[4]["chsh_violated"], true);
    }

    #[test]
    fn bell_explorer_normalizes_and_reports_inequalities() {
        let report: serde_json::Value =
            serde_json::from_str(&bell_diagonal_measures(2.0, 1.0, 1.0, 0.0)).unwrap();
        let w: Vec<f64> = report["weights"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((w[0] - 0.5).abs() < 1e-12);
        let a = report["accord"].as_f64().unwrap();
        let c = report["concurrence"].as_f64().unwrap();
        let d = report["discord"].as_f64().unwrap();
        assert!(c <= a + 1e-9);
        assert!(j_function(a.clamp(0.0, 1.0)) <= d + 1e-6);
    }

    #[test]
    fn scatter_is_seed_deterministic() {
        let a = scatter("bell_diagonal", 8, 4);
        let b = scatter("bell_diagonal", 8, 4);
        assert_eq!(a, b);
        let rows: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(rows.as_array().unwrap().len(), 8);
    }
}
