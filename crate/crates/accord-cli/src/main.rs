//! `accord`: compute quantum correlation measures, run the curve and
//! scatter experiments, simulate the coincidence game, and verify the
//! library's bounds and identities.
//!
//! Exit codes: 0 success, 2 invalid input state, 3 optimizer did not
//! converge, 4 verification failure.

use accord_core::exact::{accord_from_omcp, accord_two_qubit, omcp_isotropic, omcp_two_qubit};
use accord_core::game::{simulate_game, GameConfig};
use accord_core::linalg::{hermitian_eigen, max_abs_diff, CVector};
use accord_core::measures::{
    chsh_parameter, concurrence, discord_isotropic, discord_numerical, discord_numerical_side_min,
    j_function, mutual_information, singlet_fraction_numerical, singlet_fraction_pure,
    DiscordConfig,
};
use accord_core::optimizer::{omcp_numerical, OptimizerConfig, OptimizerError};
use accord_core::qstate::{
    make_isotropic, make_max_entangled, schmidt_decompose, state_from_json, DensityMatrix,
    PureState, StateError, Subsystem,
};
use accord_core::sampling::{random_bell_diagonal, random_two_qubit_mixed, RandomEnsemble};
use accord_core::streams::derive_rng;
use accord_core::{MeasureResult, Method};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

mod verify;

#[derive(Parser)]
#[command(
    name = "accord",
    about = "Quantum correlation measures built on the measurement-coincidence game",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// Bell-diagonal states with flat-simplex weights.
    #[value(alias = "bell_diagonal")]
    BellDiagonal,
    /// Trace two qubits out of a Haar-random four-qubit pure state.
    #[value(alias = "general_i")]
    GeneralI,
    /// Same, with real Gaussian amplitudes.
    #[value(alias = "general_ii")]
    GeneralIi,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    /// Measure subsystem A.
    A,
    /// Measure subsystem B.
    B,
    /// Take the smaller discord of the two sides.
    Min,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all measures for a state file, using closed forms where the
    /// state matches a recognized family.
    Compute {
        /// JSON state file: {"d": n, "matrix": [[[re, im], ...], ...]}.
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SideArg::Min)]
        measured_side: SideArg,
    },
    /// Tabulate the measures along the isotropic family (CSV).
    ScanIsotropic {
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Number of grid points on [0, 1].
        #[arg(long, default_value_t = 41)]
        steps: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample random states and tabulate accord against the companion
    /// measures (CSV).
    Scatter {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SideArg::Min)]
        measured_side: SideArg,
    },
    /// Simulate the sampled coincidence game on a state file (JSON out).
    Game {
        #[arg(long)]
        state: PathBuf,
        /// Guesser unitaries per spoiler unitary.
        #[arg(long, default_value_t = 64)]
        na: usize,
        /// Spoiler unitaries.
        #[arg(long, default_value_t = 64)]
        nb: usize,
        /// Measurement shots per pair; 0 uses exact probabilities.
        #[arg(long, default_value_t = 0)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and exit nonzero on any violation.
    Verify {
        /// One of: bounds, pure, two-qubit, classical, bell-inequalities,
        /// general-bound, identities, zero-accord, game, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[derive(Debug)]
enum CliError {
    State(StateError),
    Optimizer(OptimizerError),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::State(e) => write!(f, "{e}"),
            CliError::Optimizer(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::State(_) | CliError::Io(_) => 2,
            CliError::Optimizer(OptimizerError::NoConvergence { .. }) => 3,
            CliError::Optimizer(_) => 2,
        }
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        CliError::State(e)
    }
}

impl From<OptimizerError> for CliError {
    fn from(e: OptimizerError) -> Self {
        CliError::Optimizer(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Compute {
            state,
            seed,
            measured_side,
        } => cmd_compute(&state, seed, measured_side),
        Command::ScanIsotropic {
            d,
            steps,
            out,
            seed,
        } => cmd_scan_isotropic(d, steps, out, seed),
        Command::Scatter {
            family,
            count,
            seed,
            out,
            measured_side,
        } => cmd_scatter(family, count, seed, out, measured_side),
        Command::Game {
            state,
            na,
            nb,
            shots,
            seed,
            out,
        } => cmd_game(&state, na, nb, shots, seed, out),
        Command::Verify { suite, seed } => verify::cmd_verify(&suite, seed),
    }
}

fn load_state(path: &PathBuf) -> Result<DensityMatrix, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(state_from_json(&text)?)
}

fn write_output(out: Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// 12 significant digits, the CSV number format.
fn sig12(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.11e}")
    }
}

fn measure_json(m: &MeasureResult) -> serde_json::Value {
    json!({ "value": m.value, "method": m.method.as_str() })
}

fn scalar_json(value: f64, method: Method) -> serde_json::Value {
    json!({ "value": value, "method": method.as_str() })
}

/// Structural family detection: pure states by purity, isotropic states by
/// comparison with the rebuilt family member, two-qubit states by dimension.
enum Family {
    Pure(PureState),
    Isotropic(f64),
    TwoQubit,
    General,
}

fn detect_family(rho: &DensityMatrix) -> Family {
    if rho.purity() > 1.0 - 1e-10 {
        let (vals, vecs) = hermitian_eigen(rho.matrix());
        let top = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        let amps = CVector::from_fn(rho.total_dim(), |i, _| vecs[(i, top)]);
        if let Ok(psi) = PureState::normalized(amps, rho.dim_local()) {
            return Family::Pure(psi);
        }
    }
    let phi = make_max_entangled(rho.dim_local()).density();
    let overlap = (phi.matrix() * rho.matrix()).trace().re;
    if let Ok(iso) = make_isotropic(overlap.clamp(0.0, 1.0), rho.dim_local()) {
        if max_abs_diff(iso.matrix(), rho.matrix()) <= 1e-10 {
            return Family::Isotropic(overlap.clamp(0.0, 1.0));
        }
    }
    if rho.dim_local() == 2 {
        Family::TwoQubit
    } else {
        Family::General
    }
}

fn discord_for(
    rho: &DensityMatrix,
    side: SideArg,
    restarts: usize,
    seed: u64,
) -> Result<MeasureResult, OptimizerError> {
    let cfg = DiscordConfig {
        restarts,
        seed,
        ..DiscordConfig::default()
    };
    match side {
        SideArg::A => discord_numerical(
            rho,
            &DiscordConfig {
                measured_side: Subsystem::A,
                ..cfg
            },
        ),
        SideArg::B => discord_numerical(
            rho,
            &DiscordConfig {
                measured_side: Subsystem::B,
                ..cfg
            },
        ),
        SideArg::Min => discord_numerical_side_min(rho, &cfg),
    }
}

fn cmd_compute(path: &PathBuf, seed: u64, side: SideArg) -> Result<ExitCode, CliError> {
    let rho = load_state(path)?;
    let d = rho.dim_local();
    let family = detect_family(&rho);

    let (family_name, omcp) = match &family {
        Family::Pure(psi) => {
            let s = schmidt_decompose(psi)?;
            ("pure", accord_core::exact::omcp_pure(&s))
        }
        Family::Isotropic(p) => ("isotropic", omcp_isotropic(*p, d)?),
        Family::TwoQubit => ("two_qubit", omcp_two_qubit(&rho)?),
        Family::General => {
            eprintln!(
                "note: no closed form applies at d = {d}; the numerical minimax is a multi-start heuristic and global optimality is not certified"
            );
            (
                "general",
                omcp_numerical(&rho, &OptimizerConfig::with_seed(seed))?,
            )
        }
    };
    let accord = accord_from_omcp(omcp.value, d);

    let singlet_fraction = match &family {
        Family::Pure(psi) => {
            let s = schmidt_decompose(psi)?;
            scalar_json(singlet_fraction_pure(&s), Method::ClosedForm)
        }
        _ => measure_json(&singlet_fraction_numerical(&rho, 8, seed)?),
    };

    let concurrence_json = if d == 2 {
        scalar_json(concurrence(&rho)?, Method::ClosedForm)
    } else {
        serde_json::Value::Null
    };

    let discord_json = if d == 2 {
        match &family {
            Family::Isotropic(p) => scalar_json(discord_isotropic(*p)?, Method::ClosedForm),
            _ => measure_json(&discord_for(&rho, side, 16, seed)?),
        }
    } else {
        serde_json::Value::Null
    };

    let chsh_json = if d == 2 {
        let m = chsh_parameter(&rho)?;
        json!({ "value": m, "violated": m > 1.0, "method": Method::ClosedForm.as_str() })
    } else {
        serde_json::Value::Null
    };

    let report = json!({
        "d": d,
        "family": family_name,
        "purity": rho.purity(),
        "omcp": measure_json(&omcp),
        "accord": { "value": accord, "method": omcp.method.as_str() },
        "concurrence": concurrence_json,
        "discord": discord_json,
        "singlet_fraction": singlet_fraction,
        "chsh": chsh_json,
        "mutual_information": scalar_json(mutual_information(&rho), Method::ClosedForm),
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan_isotropic(
    d: usize,
    steps: usize,
    out: Option<PathBuf>,
    seed: u64,
) -> Result<ExitCode, CliError> {
    if d < 2 || steps < 2 {
        return Err(CliError::State(StateError::OutOfRange {
            name: "d/steps",
            value: d.min(steps) as f64,
            low: 2.0,
            high: f64::INFINITY,
        }));
    }
    let mut csv = String::from("p,accord,concurrence,singlet_fraction,discord,chsh_violated\n");
    for k in 0..steps {
        let p = k as f64 / (steps - 1) as f64;
        let accord = accord_from_omcp(omcp_isotropic(p, d)?.value, d);
        let rho = make_isotropic(p, d)?;
        let sf = singlet_fraction_numerical(&rho, 6, seed ^ k as u64)?.value;
        let (conc, disc, violated) = if d == 2 {
            (
                concurrence(&rho)?,
                discord_isotropic(p)?,
                if chsh_parameter(&rho)? > 1.0 {
                    1.0
                } else {
                    0.0
                },
            )
        } else {
            (f64::NAN, f64::NAN, f64::NAN)
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig12(p),
            sig12(accord),
            sig12(conc),
            sig12(sf),
            sig12(disc),
            if violated.is_nan() {
                "nan".to_string()
            } else {
                format!("{}", violated as i64)
            }
        ));
    }
    write_output(out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_scatter(
    family: FamilyArg,
    count: usize,
    seed: u64,
    out: Option<PathBuf>,
    side: SideArg,
) -> Result<ExitCode, CliError> {
    let rows: Result<Vec<String>, OptimizerError> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = derive_rng(seed, &[0x5CA7, k as u64]);
            let rho = match family {
                FamilyArg::BellDiagonal => random_bell_diagonal(&mut rng),
                FamilyArg::GeneralI => {
                    random_two_qubit_mixed(&mut rng, RandomEnsemble::HaarComplex)
                }
                FamilyArg::GeneralIi => {
                    random_two_qubit_mixed(&mut rng, RandomEnsemble::RealGaussian)
                }
            };
            let accord = accord_two_qubit(&rho).expect("two-qubit draw");
            let conc = concurrence(&rho).expect("two-qubit draw");
            let discord = discord_for(&rho, side, 6, seed ^ k as u64)?.value;
            Ok(format!(
                "{},{},{},{},{}\n",
                sig12(accord),
                sig12(conc),
                sig12(discord),
                sig12(j_function(accord.clamp(0.0, 1.0))),
                sig12(accord - conc)
            ))
        })
        .collect();
    let mut csv = String::from("accord,concurrence,discord,j_of_accord,accord_minus_concurrence\n");
    for row in rows? {
        csv.push_str(&row);
    }
    write_output(out, &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_game(
    path: &PathBuf,
    na: usize,
    nb: usize,
    shots: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<ExitCode, CliError> {
    let rho = load_state(path)?;
    let cfg = GameConfig {
        n_a: na,
        n_b: nb,
        shots,
        seed,
    };
    let result = simulate_game(&rho, &cfg)?;
    let report = json!({
        "estimate": result.estimate,
        "method": "monte_carlo",
        "n_a": na,
        "n_b": nb,
        "shots": shots,
        "seed": seed,
        "per_b_maxima": result.per_b_maxima,
        "empirical_distribution": result.empirical_distribution,
    });
    write_output(
        out,
        &format!("{}\n", serde_json::to_string_pretty(&report).expect("json")),
    )?;
    Ok(ExitCode::SUCCESS)
}
