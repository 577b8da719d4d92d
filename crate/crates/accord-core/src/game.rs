//! Monte Carlo realization of the operational five-step game: the spoiler
//! samples unitaries, the guesser samples unitaries against each of them,
//! coincidence fractions are estimated per pair (or computed exactly), and
//! the score is the min over spoiler draws of the max over guesser draws.

use crate::exact::MeasureResult;
use crate::linalg::{CMatrix, ZERO};
use crate::optimizer::{haar_random_unitary, mcp, OptimizerError};
use crate::qstate::{DensityMatrix, UnitaryMatrix};
use crate::streams::derive_rng;
use rand::Rng;

const TAG_GAME_B: u64 = 0x6B;
const TAG_GAME_A: u64 = 0x6A;
const TAG_GAME_SHOT: u64 = 0x65;

/// Parameters of the sampled game.
#[derive(Debug, Clone)]
pub struct GameConfig {
    /// Spoiler unitaries drawn.
    pub n_b: usize,
    /// Guesser unitaries drawn per spoiler unitary.
    pub n_a: usize,
    /// Measurement repetitions per unitary pair; 0 switches to exact
    /// per-pair coincidence probabilities, isolating the unitary-sampling
    /// error from shot noise.
    pub shots: usize,
    pub seed: u64,
}

impl GameConfig {
    fn validate(&self) -> Result<(), OptimizerError> {
        if self.n_a == 0 || self.n_b == 0 {
            return Err(OptimizerError::InvalidConfig(
                "n_a and n_b must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one simulated game.
#[derive(Debug, Clone)]
pub struct GameResult {
    /// `min_b max_a` of the per-pair coincidence estimates.
    pub estimate: f64,
    /// One maximum per spoiler unitary.
    pub per_b_maxima: Vec<f64>,
    /// Per-pair coincidence counts (`n_b` rows by `n_a` columns) when shots
    /// were sampled; absent in exact mode.
    pub empirical_distribution: Option<Vec<Vec<u64>>>,
}

impl GameResult {
    pub fn to_measure(&self) -> MeasureResult {
        MeasureResult::monte_carlo(self.estimate)
    }
}

/// Draw one joint measurement outcome `(n_a, n_b)` from the exact joint
/// distribution `P(i, j) = <i,j| (UA x UB) rho (UA x UB)^dag |i,j>`.
pub fn sample_measurement<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    u_a: &UnitaryMatrix,
    u_b: &UnitaryMatrix,
    rng: &mut R,
) -> Result<(usize, usize), OptimizerError> {
    let d = rho.dim_local();
    if u_a.dim() != d || u_b.dim() != d {
        return Err(OptimizerError::BadDimension {
            expected: d,
            actual: u_a.dim().max(u_b.dim()),
        });
    }
    let probs = joint_distribution(rho, u_a.matrix(), u_b.matrix());
    let mut u: f64 = rng.random::<f64>();
    let mut outcome = probs.len() - 1;
    for (idx, &p) in probs.iter().enumerate() {
        if u < p {
            outcome = idx;
            break;
        }
        u -= p;
    }
    Ok((outcome / d, outcome % d))
}

fn joint_distribution(rho: &DensityMatrix, ua: &CMatrix, ub: &CMatrix) -> Vec<f64> {
    let d = rho.dim_local();
    let m = rho.matrix();
    let mut probs = vec![0.0f64; d * d];
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            // v = (UA^dag |i>) x (UB^dag |j>)
            for ka in 0..d {
                let a = ua[(i, ka)].conj();
                for kb in 0..d {
                    v[ka * d + kb] = a * ub[(j, kb)].conj();
                }
            }
            let mut acc = ZERO;
            for (r, vr) in v.iter().enumerate() {
                let cr_ = vr.conj();
                for (s, vs) in v.iter().enumerate() {
                    acc += cr_ * m[(r, s)] * vs;
                }
            }
            probs[i * d + j] = acc.re.max(0.0);
        }
    }
    let total: f64 = probs.iter().sum();
    if total > 0.0 {
        for p in &mut probs {
            *p /= total;
        }
    }
    probs
}

/// Run the five-step game. Unitary draws and measurement outcomes stream
/// from `(seed, b_index)` and `(seed, b_index, a_index)`, so enlarging
/// `n_a` or `n_b` extends the draws without changing earlier ones and the
/// result is reproducible regardless of evaluation order.
pub fn simulate_game(rho: &DensityMatrix, cfg: &GameConfig) -> Result<GameResult, OptimizerError> {
    cfg.validate()?;
    let d = rho.dim_local();
    let mut per_b_maxima = Vec::with_capacity(cfg.n_b);
    let mut counts: Option<Vec<Vec<u64>>> = (cfg.shots > 0).then(Vec::new);
    for b_idx in 0..cfg.n_b {
        let mut rng_b = derive_rng(cfg.seed, &[TAG_GAME_B, b_idx as u64]);
        let u_b = haar_random_unitary(d, &mut rng_b);
        let mut best = f64::NEG_INFINITY;
        let mut row = (cfg.shots > 0).then(|| Vec::with_capacity(cfg.n_a));
        for a_idx in 0..cfg.n_a {
            let mut rng_a = derive_rng(cfg.seed, &[TAG_GAME_A, b_idx as u64, a_idx as u64]);
            let u_a = haar_random_unitary(d, &mut rng_a);
            let fraction = if cfg.shots == 0 {
                mcp(rho, &u_a, &u_b)?
            } else {
                let mut rng_s = derive_rng(cfg.seed, &[TAG_GAME_SHOT, b_idx as u64, a_idx as u64]);
                let mut coincidences = 0u64;
                for _ in 0..cfg.shots {
                    let (na, nb) = sample_measurement(rho, &u_a, &u_b, &mut rng_s)?;
                    if na == nb {
                        coincidences += 1;
                    }
                }
                if let Some(r) = row.as_mut() {
                    r.push(coincidences);
                }
                coincidences as f64 / cfg.shots as f64
            };
            best = best.max(fraction);
        }
        if let (Some(all), Some(r)) = (counts.as_mut(), row) {
            all.push(r);
        }
        per_b_maxima.push(best);
    }
    let estimate = per_b_maxima.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GameResult {
        estimate,
        per_b_maxima,
        empirical_distribution: counts,
    })
}
