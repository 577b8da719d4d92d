//! Direct numerical evaluation of the measurement-coincidence minimax.
//!
//! `mcp` evaluates the coincidence probability for given local unitaries;
//! `omcp_numerical` runs the nested optimization (max over the guesser's
//! unitary inside, min over the spoiler's outside) with derivative-free
//! multi-start local searches. This is the brute-force oracle the
//! closed-form evaluators in [`crate::exact`] are validated against.
//!
//! Parameterization of the search space:
//! * d = 2: the explicit four-angle chart
//!   `[[cos t e^{i phi}, sin t e^{i psi}], [-sin t e^{i(chi-psi)}, cos t e^{i(chi-phi)}]]`,
//!   searched with coordinate-wise golden-section line searches;
//! * d > 2: a length-d^2 real vector mapped through `U = exp(i H(p))`
//!   (surjective onto U(d)), searched with random-direction line searches
//!   around the current point.
//!
//! The inner maximization is resolved at every outer iterate: cheaply (warm
//! start plus deterministic seeds) while the outer line search probes, and
//! with the full multi-start budget at every outer restart's endpoint, so
//! every reported value comes from a fully resolved inner problem.

use crate::exact::{Diagnostics, MeasureResult};
use crate::linalg::{
    c, cr, exp_i_hermitian, fourier_matrix, permutation_matrices, CMatrix, C64, ZERO,
};
use crate::qstate::{DensityMatrix, UnitaryMatrix};
use crate::streams::derive_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const TAG_INNER: u64 = 0x11;
const TAG_OUTER: u64 = 0x22;

#[derive(Debug, Clone, thiserror::Error)]
pub enum OptimizerError {
    #[error("bad dimension: expected {expected}, got {actual}")]
    BadDimension { expected: usize, actual: usize },
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
    #[error("optimization did not converge; best value so far {}", .result.value)]
    NoConvergence { result: MeasureResult },
}

/// Knobs for the nested minimax search.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Haar-seeded ascents per inner maximization, on top of the
    /// deterministic seeds (conj(UB), identity, DFT, permutations).
    pub inner_restarts: usize,
    /// Haar-seeded descents for the outer minimization, on top of the
    /// deterministic seeds.
    pub outer_restarts: usize,
    /// Objective-evaluation cap per local search run.
    pub max_iterations: usize,
    /// Width below which a line-search bracket is considered converged.
    pub step_tolerance: f64,
    /// Value change below which a search is considered stationary.
    pub value_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            inner_restarts: 16,
            outer_restarts: 16,
            max_iterations: 2000,
            step_tolerance: 1e-10,
            value_tolerance: 1e-8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// A lighter profile for bulk scans; still carries the deterministic
    /// seeds, so the known optima stay reachable. The value tolerance is
    /// relaxed to what the shorter outer descents actually resolve.
    pub fn quick(seed: u64) -> Self {
        Self {
            inner_restarts: 4,
            outer_restarts: 4,
            max_iterations: 2500,
            step_tolerance: 1e-10,
            value_tolerance: 2e-7,
            seed,
        }
    }

    fn validate(&self) -> Result<(), OptimizerError> {
        if self.inner_restarts == 0 || self.outer_restarts == 0 || self.max_iterations == 0 {
            return Err(OptimizerError::InvalidConfig(
                "restart and iteration counts must be at least 1".into(),
            ));
        }
        if self.step_tolerance <= 0.0 || self.value_tolerance <= 0.0 {
            return Err(OptimizerError::InvalidConfig(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Real parameters describing one unitary.
///
/// For `dim == 2` the four values are the angles (theta, phi, psi, chi) of
/// the explicit chart; for larger dimensions they are the `dim^2`
/// coefficients of a Hermitian matrix `H` with `U = exp(i H)`.
#[derive(Debug, Clone)]
pub struct UnitaryParams {
    pub dim: usize,
    pub values: Vec<f64>,
}

impl UnitaryParams {
    pub fn angles(theta: f64, phi: f64, psi: f64, chi: f64) -> Self {
        Self {
            dim: 2,
            values: vec![theta, phi, psi, chi],
        }
    }

    pub fn from_vector(dim: usize, values: Vec<f64>) -> Result<Self, OptimizerError> {
        let expected = if dim == 2 { 4 } else { dim * dim };
        if values.len() != expected {
            return Err(OptimizerError::BadDimension {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { dim, values })
    }
}

/// Map parameters to a unitary matrix.
pub fn parameterize_unitary(p: &UnitaryParams) -> UnitaryMatrix {
    let mat = if p.dim == 2 {
        unitary_from_angles(p.values[0], p.values[1], p.values[2], p.values[3])
    } else {
        exp_i_hermitian(&hermitian_from_params(p.dim, &p.values))
    };
    UnitaryMatrix::from_matrix_unchecked(mat)
}

fn unitary_from_angles(theta: f64, phi: f64, psi: f64, chi: f64) -> CMatrix {
    let (ct, st) = (theta.cos(), theta.sin());
    let e = |a: f64| c(a.cos(), a.sin());
    CMatrix::from_row_slice(
        2,
        2,
        &[
            e(phi) * ct,
            e(psi) * st,
            -e(chi - psi) * st,
            e(chi - phi) * ct,
        ],
    )
}

fn angles_from_unitary(u: &CMatrix) -> [f64; 4] {
    let theta = u[(0, 1)].norm().atan2(u[(0, 0)].norm());
    let phi = if u[(0, 0)].norm() > 1e-14 {
        u[(0, 0)].arg()
    } else {
        0.0
    };
    let psi = if u[(0, 1)].norm() > 1e-14 {
        u[(0, 1)].arg()
    } else {
        0.0
    };
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    [theta, phi, psi, det.arg()]
}

fn hermitian_from_params(d: usize, p: &[f64]) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = cr(p[i]);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = c(p[k], p[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

// ---------------------------------------------------------------------------
// Coincidence probability evaluators
// ---------------------------------------------------------------------------

/// Measurement coincidence probability
/// `sum_n <n,n| (UA x UB) rho (UA x UB)^dag |n,n>`.
pub fn mcp(
    rho: &DensityMatrix,
    u_a: &UnitaryMatrix,
    u_b: &UnitaryMatrix,
) -> Result<f64, OptimizerError> {
    let d = rho.dim_local();
    if u_a.dim() != d {
        return Err(OptimizerError::BadDimension {
            expected: d,
            actual: u_a.dim(),
        });
    }
    if u_b.dim() != d {
        return Err(OptimizerError::BadDimension {
            expected: d,
            actual: u_b.dim(),
        });
    }
    Ok(mcp_raw(rho.matrix(), d, u_a.matrix(), u_b.matrix()))
}

fn mcp_raw(rho: &CMatrix, d: usize, ua: &CMatrix, ub: &CMatrix) -> f64 {
    let mut total = 0.0;
    let mut v = vec![ZERO; d * d];
    for n in 0..d {
        for ka in 0..d {
            let a = ua[(n, ka)].conj();
            for kb in 0..d {
                v[ka * d + kb] = a * ub[(n, kb)].conj();
            }
        }
        let mut acc = ZERO;
        for (j, vj) in v.iter().enumerate() {
            let cj = vj.conj();
            for (k, vk) in v.iter().enumerate() {
                acc += cj * rho[(j, k)] * vk;
            }
        }
        total += acc.re;
    }
    total
}

/// Pure-state coincidence probability from the Schmidt coefficients,
/// `|| (UA o UB) c ||^2` with `o` the elementwise product.
pub fn mcp_pure_fast(coeffs: &[f64], u_a: &UnitaryMatrix, u_b: &UnitaryMatrix) -> f64 {
    let d = coeffs.len();
    assert_eq!(u_a.dim(), d, "UA dimension must match the coefficients");
    assert_eq!(u_b.dim(), d, "UB dimension must match the coefficients");
    let (a, b) = (u_a.matrix(), u_b.matrix());
    let mut total = 0.0;
    for n in 0..d {
        let mut amp = ZERO;
        for i in 0..d {
            amp += a[(n, i)] * b[(n, i)] * cr(coeffs[i]);
        }
        total += amp.norm_sqr();
    }
    total
}

/// The same quantity through the trace form
/// `tr((UA L UB^T) o (UA^* L UB^dag))` with `L = diag(c)`.
pub fn mcp_pure_trace_form(coeffs: &[f64], u_a: &UnitaryMatrix, u_b: &UnitaryMatrix) -> f64 {
    let d = coeffs.len();
    assert_eq!(u_a.dim(), d);
    assert_eq!(u_b.dim(), d);
    let lambda = CMatrix::from_fn(d, d, |i, j| if i == j { cr(coeffs[i]) } else { ZERO });
    let x = u_a.matrix() * &lambda * u_b.matrix().transpose();
    let y = u_a.matrix().map(|z| z.conj()) * &lambda * u_b.matrix().adjoint();
    let mut tr = ZERO;
    for n in 0..d {
        tr += x[(n, n)] * y[(n, n)];
    }
    tr.re
}

/// Both sides of the Hadamard trace identity
/// `tr(A) tr(B) = d tr(A o B) - sum_{i<j} (a_ii - a_jj)(b_ii - b_jj)`.
pub fn hadamard_trace_identity(a: &CMatrix, b: &CMatrix) -> (C64, C64) {
    assert_eq!(a.nrows(), a.ncols());
    assert_eq!(a.shape(), b.shape());
    let d = a.nrows();
    let lhs = a.trace() * b.trace();
    let mut tr_had = ZERO;
    for i in 0..d {
        tr_had += a[(i, i)] * b[(i, i)];
    }
    let mut cross = ZERO;
    for i in 0..d {
        for j in (i + 1)..d {
            cross += (a[(i, i)] - a[(j, j)]) * (b[(i, i)] - b[(j, j)]);
        }
    }
    (lhs, cr(d as f64) * tr_had - cross)
}

/// Haar-distributed random unitary: QR of a complex Gaussian matrix with the
/// R diagonal phases folded into Q.
pub fn haar_random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitaryMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let r = qr.r();
    let phases: Vec<C64> = (0..d)
        .map(|i| {
            let rii = r[(i, i)];
            if rii.norm() > 0.0 {
                rii / rii.norm()
            } else {
                cr(1.0)
            }
        })
        .collect();
    let mut q = qr.q();
    for (j, phase) in phases.iter().enumerate() {
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::from_matrix_unchecked(q)
}

// ---------------------------------------------------------------------------
// Partial contraction: fix UB, make repeated UA evaluations cheap
// ---------------------------------------------------------------------------

/// The coincidence probability with UB folded into the state:
/// `mcp = sum_n sum_{jk} A_nj conj(A_nk) M^(n)_jk` with
/// `M^(n)_jk = sum_{ab} B_na rho_{(j,a),(k,b)} conj(B_nb)`.
struct FixedSpoiler {
    d: usize,
    m: Vec<CMatrix>,
}

impl FixedSpoiler {
    fn new(rho: &CMatrix, d: usize, ub: &CMatrix) -> Self {
        let mut m = Vec::with_capacity(d);
        for n in 0..d {
            let mut mn = CMatrix::zeros(d, d);
            for j in 0..d {
                for k in 0..d {
                    let mut acc = ZERO;
                    for a in 0..d {
                        let ba = ub[(n, a)];
                        for b in 0..d {
                            acc += ba * rho[(j * d + a, k * d + b)] * ub[(n, b)].conj();
                        }
                    }
                    mn[(j, k)] = acc;
                }
            }
            m.push(mn);
        }
        Self { d, m }
    }

    fn eval(&self, ua: &CMatrix) -> f64 {
        let d = self.d;
        let mut total = 0.0;
        for (n, mn) in self.m.iter().enumerate() {
            let mut acc = ZERO;
            for j in 0..d {
                let anj = ua[(n, j)];
                for k in 0..d {
                    acc += anj * ua[(n, k)].conj() * mn[(j, k)];
                }
            }
            total += acc.re;
        }
        total
    }
}

// ---------------------------------------------------------------------------
// Derivative-free local search on U(d)
// ---------------------------------------------------------------------------

/// A point on U(d) in a searchable chart. For d = 2 the four angles are
/// absolute coordinates; for d > 2 moves are made through `exp(i t H) B`
/// around the current base point `B`, which keeps the chart well conditioned.
#[derive(Clone)]
enum SearchPoint {
    Angles([f64; 4]),
    Base(CMatrix),
}

impl SearchPoint {
    fn seeded(u: &CMatrix) -> Self {
        if u.nrows() == 2 {
            SearchPoint::Angles(angles_from_unitary(u))
        } else {
            SearchPoint::Base(u.clone())
        }
    }

    fn n_params(&self) -> usize {
        match self {
            SearchPoint::Angles(_) => 4,
            SearchPoint::Base(b) => b.nrows() * b.nrows(),
        }
    }

    fn unitary(&self) -> CMatrix {
        match self {
            SearchPoint::Angles([t, p, s, x]) => unitary_from_angles(*t, *p, *s, *x),
            SearchPoint::Base(b) => b.clone(),
        }
    }

    /// Prepare cheap evaluation of points along one search direction.
    fn line(&self, dir: &[f64]) -> DirectionLine {
        match self {
            SearchPoint::Angles(a) => DirectionLine::Angles {
                base: *a,
                dir: [dir[0], dir[1], dir[2], dir[3]],
            },
            SearchPoint::Base(b) => DirectionLine::Cayley {
                h: hermitian_from_params(b.nrows(), dir),
                base: b.clone(),
            },
        }
    }

    fn commit(&mut self, line: &DirectionLine, t: f64) {
        match (self, line) {
            (SearchPoint::Angles(a), DirectionLine::Angles { dir, .. }) => {
                for (ai, di) in a.iter_mut().zip(dir) {
                    *ai += di * t;
                }
            }
            (SearchPoint::Base(b), line @ DirectionLine::Cayley { .. }) => {
                *b = line.at(t);
            }
            _ => unreachable!("chart mismatch"),
        }
    }
}

/// One search direction. For the exponential chart, moves use the Cayley
/// retraction `(I - i t H / 2)^{-1} (I + i t H / 2) B`: exactly unitary for
/// every `t`, tangent to `exp(i t H) B` at `t = 0`, and much cheaper than a
/// matrix exponential per evaluation.
enum DirectionLine {
    Angles { base: [f64; 4], dir: [f64; 4] },
    Cayley { h: CMatrix, base: CMatrix },
}

impl DirectionLine {
    fn at(&self, t: f64) -> CMatrix {
        match self {
            DirectionLine::Angles { base, dir } => unitary_from_angles(
                base[0] + dir[0] * t,
                base[1] + dir[1] * t,
                base[2] + dir[2] * t,
                base[3] + dir[3] * t,
            ),
            DirectionLine::Cayley { h, base } => cayley_move(h, base, t),
        }
    }
}

fn cayley_move(h: &CMatrix, base: &CMatrix, t: f64) -> CMatrix {
    let d = h.nrows();
    let half = c(0.0, 0.5 * t);
    let mut lhs = CMatrix::identity(d, d);
    let mut plus = CMatrix::identity(d, d);
    for i in 0..d {
        for j in 0..d {
            let step = half * h[(i, j)];
            lhs[(i, j)] -= step;
            plus[(i, j)] += step;
        }
    }
    let rhs = plus * base;
    solve_small(lhs, rhs)
}

/// Gaussian elimination with partial pivoting for the small well-conditioned
/// systems of the Cayley retraction (eigenvalues of the LHS have modulus at
/// least one).
fn solve_small(mut a: CMatrix, mut b: CMatrix) -> CMatrix {
    let n = a.nrows();
    let m = b.ncols();
    for col in 0..n {
        let mut pivot = col;
        let mut pmax = a[(col, col)].norm_sqr();
        for r in (col + 1)..n {
            let mag = a[(r, col)].norm_sqr();
            if mag > pmax {
                pmax = mag;
                pivot = r;
            }
        }
        if pivot != col {
            a.swap_rows(col, pivot);
            b.swap_rows(col, pivot);
        }
        let inv = cr(1.0) / a[(col, col)];
        for r in (col + 1)..n {
            let factor = a[(r, col)] * inv;
            if factor == ZERO {
                continue;
            }
            for cc in col..n {
                let sub = a[(col, cc)] * factor;
                a[(r, cc)] -= sub;
            }
            for cc in 0..m {
                let sub = b[(col, cc)] * factor;
                b[(r, cc)] -= sub;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = cr(1.0) / a[(col, col)];
        for cc in 0..m {
            let mut acc = b[(col, cc)];
            for k in (col + 1)..n {
                acc -= a[(col, k)] * b[(k, cc)];
            }
            b[(col, cc)] = acc * inv;
        }
    }
    b
}

struct SearchBudget {
    /// Cap on line searches (coordinate sweeps' members or probe
    /// directions), the unit `OptimizerConfig::max_iterations` counts.
    max_iters: u64,
    initial_width: f64,
    width_cap: f64,
    min_width: f64,
    /// Failed directions tolerated before the probe width shrinks.
    fails_per_shrink: usize,
    value_tol: f64,
    step_tol: f64,
}

/// Golden-section maximization of `g` on `[lo, hi]` after a coarse bracket
/// grid. Returns the best evaluated `(t, value)` and the evaluation count.
fn golden_max<F: FnMut(f64) -> f64>(g: &mut F, lo: f64, hi: f64, xtol: f64) -> (f64, f64, u64) {
    const GRID: usize = 7;
    let mut evals = 0u64;
    let mut best_t = 0.0;
    let mut best_v = f64::NEG_INFINITY;
    let step = (hi - lo) / (GRID - 1) as f64;
    let mut best_idx = 0;
    for i in 0..GRID {
        let t = lo + step * i as f64;
        let v = g(t);
        evals += 1;
        if v > best_v {
            best_v = v;
            best_t = t;
            best_idx = i;
        }
    }
    let (mut a, mut b) = (
        lo + step * best_idx.saturating_sub(1) as f64,
        (lo + step * (best_idx + 1) as f64).min(hi),
    );
    let inv_phi = 0.618_033_988_749_894_8;
    let mut c_t = b - inv_phi * (b - a);
    let mut d_t = a + inv_phi * (b - a);
    let mut fc = g(c_t);
    let mut fd = g(d_t);
    evals += 2;
    while b - a > xtol {
        if fc > best_v {
            best_v = fc;
            best_t = c_t;
        }
        if fd > best_v {
            best_v = fd;
            best_t = d_t;
        }
        if fc > fd {
            b = d_t;
            d_t = c_t;
            fd = fc;
            c_t = b - inv_phi * (b - a);
            fc = g(c_t);
        } else {
            a = c_t;
            c_t = d_t;
            fc = fd;
            d_t = a + inv_phi * (b - a);
            fd = g(d_t);
        }
        evals += 1;
    }
    if fc > best_v {
        best_v = fc;
        best_t = c_t;
    }
    if fd > best_v {
        best_v = fd;
        best_t = d_t;
    }
    (best_t, best_v, evals)
}

/// Where probe directions come from.
enum DirSource<'a> {
    Random(&'a mut ChaCha8Rng),
}

/// Local maximization from `point`. Coordinate-wise golden-section line
/// searches for the angle chart (d = 2); adaptive direction probe search
/// for the exponential chart (d > 2).
fn local_maximize<F: FnMut(&CMatrix) -> f64>(
    point: &mut SearchPoint,
    f: &mut F,
    budget: &SearchBudget,
    mut dirs: DirSource,
) -> (f64, u64) {
    match point {
        SearchPoint::Angles(_) => coordinate_golden_maximize(point, f, budget),
        SearchPoint::Base(_) => probe_maximize(point, f, budget, &mut dirs),
    }
}

fn coordinate_golden_maximize<F: FnMut(&CMatrix) -> f64>(
    point: &mut SearchPoint,
    f: &mut F,
    budget: &SearchBudget,
) -> (f64, u64) {
    let n = point.n_params();
    let mut best = f(&point.unitary());
    let mut evals = 1u64;
    let mut iters = 0u64;
    let mut width = budget.initial_width;
    'outer: loop {
        let sweep_start = best;
        for k in 0..n {
            if iters >= budget.max_iters {
                break 'outer;
            }
            iters += 1;
            let dir: Vec<f64> = (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
            let line = point.line(&dir);
            let xtol = budget.step_tol.max(width * 1e-3);
            let mut g = |t: f64| f(&line.at(t));
            let (t, v, e) = golden_max(&mut g, -width, width, xtol);
            evals += e;
            if v > best {
                best = v;
                point.commit(&line, t);
            }
        }
        // Shallow basins improve by tiny amounts for many sweeps, so only
        // the width schedule terminates the search: shrink whenever a sweep
        // gains less than the value tolerance.
        if best - sweep_start < budget.value_tol {
            width *= 0.35;
            if width < budget.min_width {
                break;
            }
        }
    }
    (best, evals)
}

/// Random-direction search with step extension: probe both signs at the
/// current width, extend while the value keeps improving, reuse a direction
/// while it keeps paying, and shrink the width after a run of failures.
fn probe_maximize<F: FnMut(&CMatrix) -> f64>(
    point: &mut SearchPoint,
    f: &mut F,
    budget: &SearchBudget,
    dirs: &mut DirSource,
) -> (f64, u64) {
    let n = point.n_params();
    let mut best = f(&point.unitary());
    let mut evals = 1u64;
    let mut iters = 0u64;
    let mut width = budget.initial_width;
    let mut fails = 0usize;
    let mut reuse_dir: Option<Vec<f64>> = None;
    while iters < budget.max_iters && width >= budget.min_width {
        iters += 1;
        let DirSource::Random(rng) = dirs;
        let dir = reuse_dir.take().unwrap_or_else(|| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            v.iter_mut().for_each(|x| *x /= norm);
            v
        });
        let line = point.line(&dir);
        let v_plus = f(&line.at(width));
        let v_minus = f(&line.at(-width));
        evals += 2;
        let (mut t, mut v) = if v_plus >= v_minus {
            (width, v_plus)
        } else {
            (-width, v_minus)
        };
        if v > best {
            for _ in 0..4 {
                let t_next = t * 1.8;
                let v_next = f(&line.at(t_next));
                evals += 1;
                if v_next > v {
                    t = t_next;
                    v = v_next;
                } else {
                    break;
                }
            }
            point.commit(&line, t);
            best = v;
            width = (width * 1.4).min(budget.width_cap);
            fails = 0;
            reuse_dir = Some(dir);
        } else {
            fails += 1;
            if fails >= budget.fails_per_shrink {
                width *= 0.6;
                fails = 0;
            }
        }
    }
    (best, evals)
}

// ---------------------------------------------------------------------------
// Inner maximization (the guesser's problem)
// ---------------------------------------------------------------------------

struct InnerResult {
    value: f64,
    u_a: CMatrix,
    evals: u64,
    converged: bool,
}

/// Exact inner maximization for d = 2.
///
/// With `v_n = conj(row_n UA)` the objective is
/// `v_1^dag M^(1) v_1 + v_2^dag M^(2) v_2` over orthonormal pairs, and
/// completeness (`v_2 v_2^dag = I - v_1 v_1^dag`) reduces it to
/// `tr M^(2) + v_1^dag (M^(1) - M^(2)) v_1`, maximized by the top
/// eigenvector of the 2x2 Hermitian difference.
fn inner_exact_d2(obj: &FixedSpoiler) -> (f64, CMatrix) {
    let h00 = (obj.m[0][(0, 0)] - obj.m[1][(0, 0)]).re;
    let h11 = (obj.m[0][(1, 1)] - obj.m[1][(1, 1)]).re;
    let h01 = obj.m[0][(0, 1)] - obj.m[1][(0, 1)];
    let mean = (h00 + h11) / 2.0;
    let gap = ((h00 - h11) / 2.0).hypot(h01.norm());
    let lambda_max = mean + gap;
    let value = (obj.m[1][(0, 0)] + obj.m[1][(1, 1)]).re + lambda_max;

    // Top eigenvector of [[h00, h01], [conj(h01), h11]].
    let v1 = if h01.norm() > 1e-300 {
        let x = h01;
        let y = cr(lambda_max - h00);
        let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
        [x / norm, y / norm]
    } else if h00 >= h11 {
        [cr(1.0), cr(0.0)]
    } else {
        [cr(0.0), cr(1.0)]
    };
    let v2 = [-v1[1].conj(), v1[0].conj()];
    // Rows of UA are the conjugated frame vectors.
    let ua = CMatrix::from_row_slice(
        2,
        2,
        &[v1[0].conj(), v1[1].conj(), v2[0].conj(), v2[1].conj()],
    );
    (value, ua)
}

/// Monotone fixed-point ascent for the guesser's problem.
///
/// With `v_n = conj(row_n UA)` the objective is `sum_n v_n^dag M^(n) v_n`
/// over orthonormal frames, each `M^(n)` Hermitian PSD. Linearizing each
/// (convex) quadratic form at the current frame minorizes the objective, and
/// the minorant `Re tr(V^dag G)` with `g_n = M^(n) v_n` is maximized over
/// unitaries by the polar factor of `G`. Iterating never decreases the
/// objective and converges to a first-order optimal frame.
fn mm_ascend(
    obj: &FixedSpoiler,
    seed: &CMatrix,
    value_tol: f64,
    max_iters: usize,
) -> (f64, CMatrix, u64) {
    let d = obj.d;
    // Columns of `v` are the conjugated rows of UA.
    let mut v = CMatrix::from_fn(d, d, |j, n| seed[(n, j)].conj());
    let mut best_val = obj.eval(seed);
    let mut best_ua = seed.clone();
    let mut iters = 0u64;
    let mut prev_gain = f64::INFINITY;
    let mut stall = 0u32;
    for _ in 0..max_iters {
        let mut g = CMatrix::zeros(d, d);
        for n in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += obj.m[n][(j, k)] * v[(k, n)];
                }
                g[(j, n)] = acc;
            }
        }
        let vp = crate::linalg::polar_unitary(&g);
        let ua = vp.adjoint();
        let val = obj.eval(&ua);
        iters += 1;
        let gain = val - best_val;
        if val > best_val {
            best_val = val;
            best_ua = ua;
        }
        v = vp;
        if gain <= value_tol {
            stall += 1;
            if stall >= 2 {
                break;
            }
        } else {
            stall = 0;
            // The iteration converges linearly; once the gain ratio is
            // stable the geometric tail estimates the remaining gap.
            if prev_gain.is_finite() && prev_gain > 0.0 {
                let ratio = gain / prev_gain;
                if ratio < 1.0 && gain * ratio / (1.0 - ratio) < value_tol {
                    break;
                }
            }
        }
        prev_gain = gain;
    }
    (best_val, best_ua, iters)
}

/// Convergence tolerance for individual ascents; the config tolerance bounds
/// the reported value, the ascents themselves are pushed further since the
/// fixed-point iteration is cheap.
fn ascent_tol(cfg: &OptimizerConfig) -> f64 {
    cfg.value_tolerance.min(1e-11)
}

/// Fully resolved inner maximization. Every permutation is scored, ascents
/// run from the conjugate/identity/DFT seeds, the two best-scoring
/// permutations, and `inner_restarts` Haar seeds.
fn inner_max_thorough(
    obj: &FixedSpoiler,
    ub: &CMatrix,
    cfg: &OptimizerConfig,
    salt: u64,
) -> InnerResult {
    let d = obj.d;
    if d == 2 {
        let (value, u_a) = inner_exact_d2(obj);
        return InnerResult {
            value,
            u_a,
            evals: 1,
            converged: true,
        };
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_ua = ub.map(|z| z.conj());
    let mut evals = 0u64;

    // Score every permutation spoiler response; they realize the 1/d lower
    // bound. Keep the two best as ascent seeds.
    let mut perms: Vec<(f64, CMatrix)> = permutation_matrices(d)
        .into_iter()
        .map(|p| {
            let v = obj.eval(&p);
            evals += 1;
            (v, p)
        })
        .collect();
    perms.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (v, p) in &perms {
        if *v > best {
            best = *v;
            best_ua = p.clone();
        }
    }

    let mut seeds = vec![
        ub.map(|z| z.conj()),
        CMatrix::identity(d, d),
        fourier_matrix(d),
    ];
    for (_, p) in perms.into_iter().take(2) {
        seeds.push(p);
    }
    for r in 0..cfg.inner_restarts {
        let mut rng = derive_rng(cfg.seed, &[TAG_INNER, salt, r as u64]);
        seeds.push(haar_random_unitary(d, &mut rng).matrix().clone());
    }

    let mut running_best = Vec::with_capacity(seeds.len());
    for seed in &seeds {
        let (v, ua, e) = mm_ascend(obj, seed, ascent_tol(cfg), cfg.max_iterations);
        evals += e;
        if v > best {
            best = v;
            best_ua = ua;
        }
        running_best.push(best);
    }
    // Converged when the running best had already settled before the final
    // quarter of the Haar restarts.
    let tail = (cfg.inner_restarts / 4).max(1);
    let idx = running_best.len().saturating_sub(tail + 1);
    let converged = best - running_best[idx] <= 10.0 * cfg.value_tolerance;
    InnerResult {
        value: best,
        u_a: best_ua,
        evals,
        converged,
    }
}

/// Cheap inner maximization used while the outer line search probes: one
/// monotone ascent from the best of (warm unitary, conj(UB), identity, DFT).
/// Deterministic in its inputs, so probed outer values are consistent.
fn inner_max_light(
    obj: &FixedSpoiler,
    ub: &CMatrix,
    warm: &CMatrix,
    cfg: &OptimizerConfig,
) -> (f64, CMatrix, u64) {
    let d = obj.d;
    if d == 2 {
        let (value, u_a) = inner_exact_d2(obj);
        return (value, u_a, 1);
    }
    let candidates = [
        warm.clone(),
        ub.map(|z| z.conj()),
        CMatrix::identity(d, d),
        fourier_matrix(d),
    ];
    let mut best = f64::NEG_INFINITY;
    let mut best_seed = &candidates[0];
    let mut evals = 0u64;
    for cand in &candidates {
        let v = obj.eval(cand);
        evals += 1;
        if v > best {
            best = v;
            best_seed = cand;
        }
    }
    let (v, ua, e) = mm_ascend(obj, best_seed, ascent_tol(cfg), 150);
    evals += e;
    (v.max(best), ua, evals)
}

/// Best coincidence probability the guesser can reach against a fixed `u_b`,
/// together with the achieving unitary. Multi-start ascent from Haar seeds
/// plus the deterministic seeds; monotone nondecreasing as it iterates.
pub fn inner_max(
    rho: &DensityMatrix,
    u_b: &UnitaryMatrix,
    cfg: &OptimizerConfig,
) -> Result<(f64, UnitaryMatrix), OptimizerError> {
    cfg.validate()?;
    let d = rho.dim_local();
    if u_b.dim() != d {
        return Err(OptimizerError::BadDimension {
            expected: d,
            actual: u_b.dim(),
        });
    }
    let obj = FixedSpoiler::new(rho.matrix(), d, u_b.matrix());
    let res = inner_max_thorough(&obj, u_b.matrix(), cfg, 0);
    let ua = UnitaryMatrix::from_matrix_unchecked(res.u_a);
    if res.converged {
        Ok((res.value, ua))
    } else {
        let diag = Diagnostics {
            restarts: cfg.inner_restarts,
            iterations: res.evals,
            best_value: res.value,
            worst_value: res.value,
            optimal_u_a: Some(ua),
            optimal_u_b: Some(u_b.clone()),
            measured_side: None,
        };
        Err(OptimizerError::NoConvergence {
            result: MeasureResult::numerical(res.value, diag),
        })
    }
}

// ---------------------------------------------------------------------------
// Outer minimization (the spoiler's problem)
// ---------------------------------------------------------------------------

struct RestartOutcome {
    value: f64,
    u_b: CMatrix,
    u_a: CMatrix,
    converged: bool,
}

/// Numerical OMCP: multi-start local descent of the inner-max value over the
/// spoiler's unitary.
///
/// Deterministic descent seeds are the DFT and the identity; permutation
/// spoilers are scored without descent (they exist to keep the known
/// bound-achieving points in the candidate set); the remaining seeds are
/// Haar draws on independent derived streams, so the result depends only on
/// `(seed, config)` and not on scheduling.
pub fn omcp_numerical(
    rho: &DensityMatrix,
    cfg: &OptimizerConfig,
) -> Result<MeasureResult, OptimizerError> {
    cfg.validate()?;
    let d = rho.dim_local();
    let rho_m = rho.matrix();
    let mut total_evals = 0u64;
    let mut outcomes: Vec<RestartOutcome> = Vec::new();

    let thorough_at = |ub: &CMatrix, salt: u64, total_evals: &mut u64| -> RestartOutcome {
        let obj = FixedSpoiler::new(rho_m, d, ub);
        let res = inner_max_thorough(&obj, ub, cfg, salt);
        *total_evals += res.evals;
        RestartOutcome {
            value: res.value,
            u_b: ub.clone(),
            u_a: res.u_a,
            converged: res.converged,
        }
    };

    // Permutation spoilers: scored, not descended from.
    for (i, p) in permutation_matrices(d).into_iter().enumerate() {
        outcomes.push(thorough_at(&p, 0x700 + i as u64, &mut total_evals));
    }

    let n_params = if d == 2 { 4 } else { d * d };
    let descend_from = |seed: CMatrix, salt: u64, total_evals: &mut u64| -> RestartOutcome {
        let mut point = SearchPoint::seeded(&seed);
        let mut warm = seed.map(|z| z.conj());
        let mut dir_rng = derive_rng(cfg.seed, &[TAG_OUTER, salt, 0xBB]);
        let budget = SearchBudget {
            max_iters: cfg.max_iterations as u64,
            initial_width: 1.2,
            width_cap: 2.4,
            min_width: 1e-9_f64.max(cfg.step_tolerance * 10.0),
            fails_per_shrink: (n_params / 2).max(6),
            value_tol: cfg.value_tolerance,
            step_tol: cfg.step_tolerance,
        };
        let mut probe_evals = 0u64;
        {
            let mut f = |ub: &CMatrix| {
                let obj = FixedSpoiler::new(rho_m, d, ub);
                let (v, ua, e) = inner_max_light(&obj, ub, &warm, cfg);
                warm = ua;
                probe_evals += e;
                // Negated: the spoiler minimizes.
                -v
            };
            local_maximize(&mut point, &mut f, &budget, DirSource::Random(&mut dir_rng));
        }
        *total_evals += probe_evals;
        thorough_at(&point.unitary(), salt, total_evals)
    };

    outcomes.push(descend_from(fourier_matrix(d), 1, &mut total_evals));
    outcomes.push(descend_from(CMatrix::identity(d, d), 2, &mut total_evals));
    for r in 0..cfg.outer_restarts {
        let mut rng = derive_rng(cfg.seed, &[TAG_OUTER, 0x4A, r as u64]);
        let seed = haar_random_unitary(d, &mut rng).matrix().clone();
        outcomes.push(descend_from(seed, 0x100 + r as u64, &mut total_evals));
    }

    let best_idx = outcomes
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let best_value = outcomes[best_idx].value;
    let worst_value = outcomes
        .iter()
        .map(|o| o.value)
        .fold(f64::NEG_INFINITY, f64::max);

    // Converged when the minimum was already reached (within 10x tolerance)
    // before the last quarter of the Haar restarts, and the winning
    // restart's own inner maximization converged.
    let tail = (cfg.outer_restarts / 4).max(1);
    let cut = outcomes.len() - tail;
    let prefix_best = outcomes[..cut]
        .iter()
        .map(|o| o.value)
        .fold(f64::INFINITY, f64::min);
    let converged =
        outcomes[best_idx].converged && prefix_best - best_value <= 10.0 * cfg.value_tolerance;

    let diagnostics = Diagnostics {
        restarts: outcomes.len(),
        iterations: total_evals,
        best_value,
        worst_value,
        optimal_u_a: Some(UnitaryMatrix::from_matrix_unchecked(
            outcomes[best_idx].u_a.clone(),
        )),
        optimal_u_b: Some(UnitaryMatrix::from_matrix_unchecked(
            outcomes[best_idx].u_b.clone(),
        )),
        measured_side: None,
    };
    let result = MeasureResult::numerical(best_value, diagnostics);
    if converged {
        Ok(result)
    } else {
        Err(OptimizerError::NoConvergence { result })
    }
}
