//! Companion correlation measures used for comparisons: concurrence,
//! singlet fraction, mutual information, quantum discord and the CHSH
//! parameter.

use crate::exact::{Diagnostics, MeasureResult};
use crate::linalg::{c, cr, pauli, polar_unitary, psd_sqrt, CMatrix, CVector, C64};
use crate::optimizer::OptimizerError;
use crate::qstate::{
    bloch_decompose, partial_trace, tensor_product, von_neumann_entropy, DensityMatrix,
    SchmidtForm, StateError, Subsystem, UnitaryMatrix,
};
use crate::streams::derive_rng;
use rand::Rng;

const TAG_DISCORD: u64 = 0xD15C;
const TAG_SINGLET: u64 = 0x5176;

/// Settings for the numerical discord optimization.
#[derive(Debug, Clone)]
pub struct DiscordConfig {
    /// Subsystem the rank-1 projective measurement acts on.
    pub measured_side: Subsystem,
    /// Random restarts on top of the three axis seeds.
    pub restarts: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for DiscordConfig {
    fn default() -> Self {
        Self {
            measured_side: Subsystem::A,
            restarts: 32,
            tolerance: 1e-9,
            seed: 0,
        }
    }
}

/// Wootters concurrence of a two-qubit state.
///
/// The spin-flip spectrum is computed from the Hermitian product
/// `sqrt(rho) rho~ sqrt(rho)` (similar to `rho rho~`, numerically stabler);
/// eigenvalues below zero from rounding are clipped before the square root.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, StateError> {
    if rho.dim_local() != 2 {
        return Err(StateError::BadDimension {
            expected: 2,
            actual: rho.dim_local(),
        });
    }
    let yy = tensor_product(&pauli(2), &pauli(2));
    let flipped = &yy * rho.matrix().map(|z| z.conj()) * &yy;
    let root = psd_sqrt(rho.matrix());
    let herm = &root * flipped * &root;
    let mut lambdas: Vec<f64> = crate::linalg::hermitian_eigenvalues(&herm)
        .into_iter()
        .map(|l| if l < 1e-12 { 0.0 } else { l }.sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Pure-state singlet fraction `(sum_i c_i)^2 / d`; identical to the
/// pure-state OMCP.
pub fn singlet_fraction_pure(s: &SchmidtForm) -> f64 {
    let sum = s.coeff_sum();
    sum * sum / s.dim_local() as f64
}

/// Largest overlap of `rho` with any maximally entangled state.
///
/// Every maximally entangled state is `vec(W)/sqrt(d)` for a unitary `W`
/// (namely `W = UA UB^T`), so the singlet fraction is the maximum of a PSD
/// quadratic form over the unitary group. The same monotone polar-factor
/// ascent as the coincidence optimizer applies, multi-started from the
/// identity, the DFT, the Pauli rotations of the d = 2 Bell basis, and Haar
/// seeds.
pub fn singlet_fraction_numerical(
    rho: &DensityMatrix,
    restarts: usize,
    seed: u64,
) -> Result<MeasureResult, OptimizerError> {
    if restarts == 0 {
        return Err(OptimizerError::InvalidConfig(
            "restarts must be at least 1".into(),
        ));
    }
    let d = rho.dim_local();
    let m = rho.matrix();
    let overlap = |w: &CMatrix| -> f64 {
        let mut v = CVector::zeros(d * d);
        for i in 0..d {
            for j in 0..d {
                v[i * d + j] = w[(i, j)];
            }
        }
        ((v.adjoint() * m * &v)[(0, 0)].re / d as f64).max(0.0)
    };
    // Minorize-maximize: g = unvec(rho vec(W)), next W is polar(g).
    let ascend = |w0: &CMatrix, evals: &mut u64| -> (f64, CMatrix) {
        let mut w = w0.clone();
        let mut best = overlap(&w);
        let mut best_w = w.clone();
        for _ in 0..200 {
            let mut v = CVector::zeros(d * d);
            for i in 0..d {
                for j in 0..d {
                    v[i * d + j] = w[(i, j)];
                }
            }
            let g_vec = m * v;
            let g = CMatrix::from_fn(d, d, |i, j| g_vec[i * d + j]);
            w = polar_unitary(&g);
            let val = overlap(&w);
            *evals += 1;
            let improved = val > best + 1e-13;
            if val > best {
                best = val;
                best_w = w.clone();
            }
            if !improved {
                break;
            }
        }
        (best, best_w)
    };

    let mut seeds: Vec<CMatrix> = vec![CMatrix::identity(d, d), crate::linalg::fourier_matrix(d)];
    if d == 2 {
        for k in 1..=3 {
            seeds.push(pauli(k));
        }
    }
    for r in 0..restarts {
        let mut rng = derive_rng(seed, &[TAG_SINGLET, r as u64]);
        seeds.push(
            crate::optimizer::haar_random_unitary(d, &mut rng)
                .matrix()
                .clone(),
        );
    }
    let mut evals = 0u64;
    let mut best = f64::NEG_INFINITY;
    let mut best_w = seeds[0].clone();
    let mut worst = f64::INFINITY;
    for s in &seeds {
        let (v, w) = ascend(s, &mut evals);
        if v > best {
            best = v;
            best_w = w;
        }
        worst = worst.min(v);
    }
    let diag = Diagnostics {
        restarts: seeds.len(),
        iterations: evals,
        best_value: best,
        worst_value: worst,
        optimal_u_a: Some(UnitaryMatrix::from_matrix_unchecked(best_w)),
        optimal_u_b: None,
        measured_side: None,
    };
    Ok(MeasureResult::numerical(best, diag))
}

/// Quantum mutual information `S(rho_A) + S(rho_B) - S(rho)` in bits.
pub fn mutual_information(rho: &DensityMatrix) -> f64 {
    let sa = von_neumann_entropy(&partial_trace(rho, Subsystem::A));
    let sb = von_neumann_entropy(&partial_trace(rho, Subsystem::B));
    sa + sb - von_neumann_entropy(rho.matrix())
}

/// `J(a) = [(1+a) log2(1+a) + (1-a) log2(1-a)] / 2`, the classical
/// correlation reachable at accord `a`; `J(1) = 1` by continuity.
pub fn j_function(a: f64) -> f64 {
    assert!(
        (-1e-9..=1.0 + 1e-9).contains(&a),
        "accord {a} outside [0, 1]"
    );
    let a = a.clamp(0.0, 1.0);
    let up = (1.0 + a) * (1.0 + a).log2();
    let down = if a >= 1.0 {
        0.0
    } else {
        (1.0 - a) * (1.0 - a).log2()
    };
    (up + down) / 2.0
}

/// Discord of the d = 2 isotropic family through `D = I - J(accord)`.
pub fn discord_isotropic(p: f64) -> Result<f64, StateError> {
    let rho = crate::qstate::make_isotropic(p, 2)?;
    let omcp = crate::exact::omcp_isotropic(p, 2)?.value;
    let accord = crate::exact::accord_from_omcp(omcp, 2);
    Ok(mutual_information(&rho) - j_function(accord))
}

/// Discord of the Bell-diagonal family with weights
/// `(1/2, x/2, (1-x)/2, 0)`, which has zero accord and zero concurrence for
/// every `x` in `[0, 1]`.
pub fn discord_bell_family(x: f64) -> Result<f64, StateError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(StateError::OutOfRange {
            name: "x",
            value: x,
            low: 0.0,
            high: 1.0,
        });
    }
    let xlog = |v: f64| if v > 0.0 { v * v.log2() } else { 0.0 };
    Ok(1.5 + xlog(x / 2.0) + xlog((1.0 - x) / 2.0) - j_function(0.5 + (x - 0.5).abs()))
}

fn entropy_2x2_entries(m00: C64, m01: C64, m10: C64, m11: C64) -> f64 {
    let tr = (m00 + m11).re;
    let det = (m00 * m11 - m01 * m10).re;
    let half = tr / 2.0;
    let gap = (half * half - det).max(0.0).sqrt();
    let mut s = 0.0;
    for lambda in [half + gap, half - gap] {
        if lambda > 0.0 {
            s -= lambda * lambda.log2();
        }
    }
    s
}

/// Classical correlation extracted by a rank-1 projective measurement along
/// the Bloch direction `(theta, phi)` on the measured side.
///
/// Since the projectors are idempotent, the unnormalized conditional state
/// contracts to `M_{j j'} = sum_{a b} P_{b a} rho_{(a j),(b j')}` for a
/// measurement on A (indices swapped for B), which avoids forming any 4x4
/// product.
fn classical_correlation_at(
    rho: &DensityMatrix,
    side: Subsystem,
    s_other: f64,
    theta: f64,
    phi: f64,
) -> f64 {
    let (nx, ny, nz) = (
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    );
    // Projectors (I +- n.sigma)/2, entries written out.
    let up = [
        [cr((1.0 + nz) / 2.0), c(nx / 2.0, -ny / 2.0)],
        [c(nx / 2.0, ny / 2.0), cr((1.0 - nz) / 2.0)],
    ];
    let dn = [
        [cr((1.0 - nz) / 2.0), c(-nx / 2.0, ny / 2.0)],
        [c(-nx / 2.0, -ny / 2.0), cr((1.0 + nz) / 2.0)],
    ];
    let m = rho.matrix();
    let entry = |a: usize, j: usize, b: usize, jp: usize| match side {
        Subsystem::A => m[(a * 2 + j, b * 2 + jp)],
        Subsystem::B => m[(j * 2 + a, jp * 2 + b)],
    };
    let mut conditional = 0.0;
    for proj in [up, dn] {
        let mut cond = [[C64::from(0.0); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                let pba = proj[b][a];
                if pba.norm_sqr() == 0.0 {
                    continue;
                }
                for (j, row) in cond.iter_mut().enumerate() {
                    for (jp, slot) in row.iter_mut().enumerate() {
                        *slot += pba * entry(a, j, b, jp);
                    }
                }
            }
        }
        let weight = (cond[0][0] + cond[1][1]).re;
        if weight > 1e-15 {
            let inv = cr(1.0 / weight);
            conditional += weight
                * entropy_2x2_entries(
                    cond[0][0] * inv,
                    cond[0][1] * inv,
                    cond[1][0] * inv,
                    cond[1][1] * inv,
                );
        }
    }
    s_other - conditional
}

/// Quantum discord by numerical optimization over rank-1 projective
/// measurements on the configured side:
/// `I(rho) - max_n [S(rho_other) - sum_k p_k S(rho_other | k)]`.
pub fn discord_numerical(
    rho: &DensityMatrix,
    cfg: &DiscordConfig,
) -> Result<MeasureResult, OptimizerError> {
    if rho.dim_local() != 2 {
        return Err(OptimizerError::BadDimension {
            expected: 2,
            actual: rho.dim_local(),
        });
    }
    if cfg.restarts == 0 {
        return Err(OptimizerError::InvalidConfig(
            "restarts must be at least 1".into(),
        ));
    }
    let other = match cfg.measured_side {
        Subsystem::A => Subsystem::B,
        Subsystem::B => Subsystem::A,
    };
    let s_other = von_neumann_entropy(&partial_trace(rho, other));
    let mutual = mutual_information(rho);

    let eval = |theta: f64, phi: f64| {
        classical_correlation_at(rho, cfg.measured_side, s_other, theta, phi)
    };

    // Axis seeds (z, x, y) then uniform sphere restarts.
    let mut seeds = vec![
        (0.0, 0.0),
        (std::f64::consts::FRAC_PI_2, 0.0),
        (std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
    ];
    for r in 0..cfg.restarts {
        let mut rng = derive_rng(cfg.seed, &[TAG_DISCORD, r as u64]);
        let z: f64 = rng.random_range(-1.0..1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        seeds.push((z.acos(), phi));
    }

    let mut evals = 0u64;
    let mut best = f64::NEG_INFINITY;
    let mut running_best = Vec::with_capacity(seeds.len());
    for &(t0, p0) in &seeds {
        let (mut t, mut p) = (t0, p0);
        let mut val = eval(t, p);
        evals += 1;
        let mut width = 0.8f64;
        while width > 1e-6 {
            let mut improved = false;
            for coord in 0..2 {
                let xtol = cfg.tolerance.max(width * 1e-3);
                let (bt, bp, bv, used) = line_refine(&eval, t, p, coord, width, xtol);
                evals += used;
                if bv > val {
                    val = bv;
                    t = bt;
                    p = bp;
                    improved = true;
                }
            }
            if !improved {
                width *= 0.35;
            }
        }
        best = best.max(val);
        running_best.push(best);
    }

    let tail = (cfg.restarts / 4).max(1);
    let idx = running_best.len().saturating_sub(tail + 1);
    let converged = best - running_best[idx] <= 10.0 * cfg.tolerance.max(1e-12);

    // Rounding in the subtraction can leave a tiny negative residue.
    let mut discord = mutual - best;
    if discord < 0.0 && discord > -1e-8 {
        discord = 0.0;
    }
    let diag = Diagnostics {
        restarts: seeds.len(),
        iterations: evals,
        best_value: discord,
        worst_value: discord,
        optimal_u_a: None,
        optimal_u_b: None,
        measured_side: Some(cfg.measured_side),
    };
    let result = MeasureResult::numerical(discord, diag);
    if converged {
        Ok(result)
    } else {
        Err(OptimizerError::NoConvergence { result })
    }
}

/// Discord minimized over the measured side; the tighter of the two
/// asymmetric values.
pub fn discord_numerical_side_min(
    rho: &DensityMatrix,
    cfg: &DiscordConfig,
) -> Result<MeasureResult, OptimizerError> {
    let a = discord_numerical(
        rho,
        &DiscordConfig {
            measured_side: Subsystem::A,
            ..cfg.clone()
        },
    )?;
    let b = discord_numerical(
        rho,
        &DiscordConfig {
            measured_side: Subsystem::B,
            ..cfg.clone()
        },
    )?;
    Ok(if a.value <= b.value { a } else { b })
}

fn line_refine<F: Fn(f64, f64) -> f64>(
    eval: &F,
    t: f64,
    p: f64,
    coord: usize,
    width: f64,
    xtol: f64,
) -> (f64, f64, f64, u64) {
    let at = |x: f64| match coord {
        0 => (x, p),
        _ => (t, x),
    };
    let center = if coord == 0 { t } else { p };
    let mut evals = 0u64;
    let g = |x: f64, evals: &mut u64| {
        let (tt, pp) = at(x);
        *evals += 1;
        eval(tt, pp)
    };
    const GRID: usize = 7;
    let lo = center - width;
    let hi = center + width;
    let step = (hi - lo) / (GRID - 1) as f64;
    let mut best_x = center;
    let mut best_v = f64::NEG_INFINITY;
    let mut best_i = 0;
    for i in 0..GRID {
        let x = lo + step * i as f64;
        let v = g(x, &mut evals);
        if v > best_v {
            best_v = v;
            best_x = x;
            best_i = i;
        }
    }
    let (mut a, mut b) = (
        lo + step * best_i.saturating_sub(1) as f64,
        (lo + step * (best_i + 1) as f64).min(hi),
    );
    let inv_phi = 0.618_033_988_749_894_8;
    let mut c1 = b - inv_phi * (b - a);
    let mut d1 = a + inv_phi * (b - a);
    let mut fc = g(c1, &mut evals);
    let mut fd = g(d1, &mut evals);
    while b - a > xtol.max(1e-10) {
        if fc > best_v {
            best_v = fc;
            best_x = c1;
        }
        if fd > best_v {
            best_v = fd;
            best_x = d1;
        }
        if fc > fd {
            b = d1;
            d1 = c1;
            fd = fc;
            c1 = b - inv_phi * (b - a);
            fc = g(c1, &mut evals);
        } else {
            a = c1;
            c1 = d1;
            fc = fd;
            d1 = a + inv_phi * (b - a);
            fd = g(d1, &mut evals);
        }
    }
    let (bt, bp) = at(best_x);
    (bt, bp, best_v, evals)
}

/// Horodecki CHSH parameter: the sum of the two largest squared singular
/// values of the correlation matrix. The inequality is violated exactly when
/// the value exceeds 1.
pub fn chsh_parameter(rho: &DensityMatrix) -> Result<f64, StateError> {
    let b = bloch_decompose(rho)?;
    let mut svals: Vec<f64> = b.t.singular_values().iter().copied().collect();
    svals.sort_by(|a, b| b.total_cmp(a));
    Ok(svals[0] * svals[0] + svals[1] * svals[1])
}
