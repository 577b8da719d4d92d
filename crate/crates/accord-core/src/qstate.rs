//! Bipartite state representations and the decompositions everything else
//! consumes: validation, partial trace, Schmidt and Bloch forms, entropy,
//! constructors for the standard state families, and the JSON state format.
//!
//! Index convention: subsystem A is always the slow (outer) index, so a
//! basis vector of the joint space is `|i>_A |j>_B  <->  index i*d + j`.

use crate::linalg::{
    c, cr, fourier_matrix, hermitian_eigenvalues, pauli, unitarity_deviation, CMatrix, CVector,
    ONE, ZERO,
};
use nalgebra::{Matrix3, Vector3};

/// Tolerance for Hermiticity and trace checks.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue allowed before a matrix is rejected as not PSD.
pub const PSD_EIGENVALUE_FLOOR: f64 = -1e-10;
/// Tolerance on the norm of a pure state vector.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance for the unitarity check `max |(U^dag U - I)_ij|`.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, thiserror::Error)]
pub enum StateError {
    #[error("not Hermitian: max |m_ij - conj(m_ji)| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("trace is not one: |tr - 1| = {deviation:.3e}")]
    NotUnitTrace { deviation: f64 },
    #[error("not positive semidefinite: smallest eigenvalue = {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("bad dimension: expected {expected}, got {actual}")]
    BadDimension { expected: usize, actual: usize },
    #[error("state vector is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },
    #[error("not unitary: max |(U^dag U - I)_ij| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("{name} = {value} is outside [{low}, {high}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("bad state file: {0}")]
    BadFile(String),
}

/// Which subsystem to keep in a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A validated bipartite density matrix with equal local dimensions.
///
/// The matrix has side `d^2` and is Hermitian, unit trace and positive
/// semidefinite within the module tolerances.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim_local: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validate a raw matrix as a density matrix with local dimension `d`.
    pub fn new(mat: CMatrix, d: usize) -> Result<Self, StateError> {
        validate_density(mat, d)
    }

    pub(crate) fn from_parts_unchecked(dim_local: usize, mat: CMatrix) -> Self {
        Self { dim_local, mat }
    }

    pub fn dim_local(&self) -> usize {
        self.dim_local
    }

    pub fn total_dim(&self) -> usize {
        self.dim_local * self.dim_local
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Tr(rho^2), equal to 1 exactly when the state is pure.
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Conjugate by a product of local unitaries, `(UA x UB) rho (UA x UB)^dag`.
    pub fn apply_local_unitaries(
        &self,
        u_a: &UnitaryMatrix,
        u_b: &UnitaryMatrix,
    ) -> Result<Self, StateError> {
        if u_a.dim() != self.dim_local || u_b.dim() != self.dim_local {
            return Err(StateError::BadDimension {
                expected: self.dim_local,
                actual: u_a.dim().max(u_b.dim()),
            });
        }
        let w = tensor_product(u_a.matrix(), u_b.matrix());
        let mat = &w * &self.mat * w.adjoint();
        Ok(Self::from_parts_unchecked(self.dim_local, mat))
    }

    /// Exchange the two subsystems.
    pub fn swap_subsystems(&self) -> Self {
        let d = self.dim_local;
        let mat = CMatrix::from_fn(d * d, d * d, |r, col| {
            let (ra, rb) = (r / d, r % d);
            let (ca, cb) = (col / d, col % d);
            self.mat[(rb * d + ra, cb * d + ca)]
        });
        Self::from_parts_unchecked(d, mat)
    }
}

/// A normalized pure state of the joint system.
#[derive(Debug, Clone)]
pub struct PureState {
    dim_local: usize,
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector, dim_local: usize) -> Result<Self, StateError> {
        if amps.len() != dim_local * dim_local {
            return Err(StateError::BadDimension {
                expected: dim_local * dim_local,
                actual: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self { dim_local, amps })
    }

    /// Normalize and wrap; fails only on the zero vector.
    pub fn normalized(mut amps: CVector, dim_local: usize) -> Result<Self, StateError> {
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(StateError::NotNormalized { norm });
        }
        amps /= cr(norm);
        Self::new(amps, dim_local)
    }

    pub fn dim_local(&self) -> usize {
        self.dim_local
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// The projector |psi><psi| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let mat = &self.amps * self.amps.adjoint();
        DensityMatrix::from_parts_unchecked(self.dim_local, mat)
    }
}

/// A matrix validated to be unitary within [`UNITARITY_TOL`].
#[derive(Debug, Clone)]
pub struct UnitaryMatrix {
    mat: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(mat: CMatrix) -> Result<Self, StateError> {
        if mat.nrows() != mat.ncols() {
            return Err(StateError::BadDimension {
                expected: mat.nrows(),
                actual: mat.ncols(),
            });
        }
        let deviation = unitarity_deviation(&mat);
        if deviation > UNITARITY_TOL {
            return Err(StateError::NotUnitary { deviation });
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mat: CMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Entrywise complex conjugate (still unitary).
    pub fn conjugate(&self) -> Self {
        Self {
            mat: self.mat.map(|z| z.conj()),
        }
    }
}

/// Schmidt decomposition of a bipartite pure state:
/// `|psi> = (UA x UB) sum_i c_i |i>|i>` with the coefficients sorted
/// descending, nonnegative, and summing to one in squares.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    coeffs: Vec<f64>,
    left_unitary: UnitaryMatrix,
    right_unitary: UnitaryMatrix,
}

impl SchmidtForm {
    /// Build from bare coefficients with identity basis unitaries.
    /// Accepts any nonnegative vector, normalizes, and sorts descending.
    pub fn from_coeffs(mut coeffs: Vec<f64>) -> Result<Self, StateError> {
        if coeffs.is_empty() {
            return Err(StateError::BadDimension {
                expected: 1,
                actual: 0,
            });
        }
        for &v in &coeffs {
            if v < 0.0 {
                return Err(StateError::OutOfRange {
                    name: "schmidt coefficient",
                    value: v,
                    low: 0.0,
                    high: 1.0,
                });
            }
        }
        let norm = coeffs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(StateError::NotNormalized { norm });
        }
        coeffs.iter_mut().for_each(|v| *v /= norm);
        coeffs.sort_by(|a, b| b.total_cmp(a));
        let d = coeffs.len();
        Ok(Self {
            coeffs,
            left_unitary: UnitaryMatrix::identity(d),
            right_unitary: UnitaryMatrix::identity(d),
        })
    }

    pub fn dim_local(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff_sum(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn left_unitary(&self) -> &UnitaryMatrix {
        &self.left_unitary
    }

    pub fn right_unitary(&self) -> &UnitaryMatrix {
        &self.right_unitary
    }

    /// Rebuild the pure state `(UA x UB) sum_i c_i |i>|i>`.
    pub fn recompose(&self) -> PureState {
        let d = self.coeffs.len();
        let ua = self.left_unitary.matrix();
        let ub = self.right_unitary.matrix();
        let mut amps = CVector::zeros(d * d);
        for k in 0..d {
            let ck = cr(self.coeffs[k]);
            for i in 0..d {
                for j in 0..d {
                    amps[i * d + j] += ck * ua[(i, k)] * ub[(j, k)];
                }
            }
        }
        PureState::normalized(amps, d).expect("recomposition of a normalized state")
    }
}

/// Bloch decomposition of a two-qubit state: local vectors `x`, `y` and the
/// 3x3 correlation matrix `t` with `t_ij = tr(rho (sigma_i x sigma_j))`.
#[derive(Debug, Clone)]
pub struct BlochForm {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
    pub t: Matrix3<f64>,
}

/// Validate a raw complex matrix as a density matrix with local dimension `d`.
pub fn validate_density(mat: CMatrix, d: usize) -> Result<DensityMatrix, StateError> {
    if d == 0 {
        return Err(StateError::BadDimension {
            expected: 1,
            actual: 0,
        });
    }
    let side = d * d;
    if mat.nrows() != side || mat.ncols() != side {
        return Err(StateError::BadDimension {
            expected: side,
            actual: mat.nrows().max(mat.ncols()),
        });
    }
    let mut herm_dev = 0.0f64;
    for i in 0..side {
        for j in i..side {
            herm_dev = herm_dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    if herm_dev > HERMITICITY_TOL {
        return Err(StateError::NotHermitian {
            deviation: herm_dev,
        });
    }
    let trace_dev = (mat.trace() - ONE).norm();
    if trace_dev > TRACE_TOL {
        return Err(StateError::NotUnitTrace {
            deviation: trace_dev,
        });
    }
    // Work with the Hermitian average so the eigensolver sees an exactly
    // Hermitian matrix.
    let herm = (&mat + mat.adjoint()).scale(0.5);
    let min_eig = hermitian_eigenvalues(&herm).first().copied().unwrap_or(0.0);
    if min_eig < PSD_EIGENVALUE_FLOOR {
        return Err(StateError::NotPsd {
            min_eigenvalue: min_eig,
        });
    }
    Ok(DensityMatrix::from_parts_unchecked(d, mat))
}

/// Kronecker product with subsystem A as the slow index:
/// `(A x B)_{(i,k),(j,l)} = A_ij B_kl`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Reduced density matrix on the kept subsystem.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> CMatrix {
    let d = rho.dim_local();
    let m = rho.matrix();
    let mut out = CMatrix::zeros(d, d);
    match keep {
        Subsystem::A => {
            for i in 0..d {
                for ip in 0..d {
                    let mut acc = ZERO;
                    for j in 0..d {
                        acc += m[(i * d + j, ip * d + j)];
                    }
                    out[(i, ip)] = acc;
                }
            }
        }
        Subsystem::B => {
            for j in 0..d {
                for jp in 0..d {
                    let mut acc = ZERO;
                    for i in 0..d {
                        acc += m[(i * d + j, i * d + jp)];
                    }
                    out[(j, jp)] = acc;
                }
            }
        }
    }
    out
}

/// Schmidt decomposition of a normalized pure state via the SVD of the
/// coefficient matrix `C_ij = psi_{i*d+j}`. Coefficients come out sorted
/// descending; ties keep the SVD ordering.
pub fn schmidt_decompose(psi: &PureState) -> Result<SchmidtForm, StateError> {
    let d = psi.dim_local();
    let norm = psi.amplitudes().norm();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(StateError::NotNormalized { norm });
    }
    let coeff_mat = CMatrix::from_fn(d, d, |i, j| psi.amplitudes()[i * d + j]);
    let svd = coeff_mat.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let coeffs: Vec<f64> = svd.singular_values.iter().copied().collect();
    // C = U S V_t, so |psi> = sum_k s_k (U|k>) x (V_t^T |k>).
    let left = UnitaryMatrix::from_matrix_unchecked(u);
    let right = UnitaryMatrix::from_matrix_unchecked(v_t.transpose());
    Ok(SchmidtForm {
        coeffs,
        left_unitary: left,
        right_unitary: right,
    })
}

/// Pauli expectations of a two-qubit state.
pub fn bloch_decompose(rho: &DensityMatrix) -> Result<BlochForm, StateError> {
    if rho.dim_local() != 2 {
        return Err(StateError::BadDimension {
            expected: 2,
            actual: rho.dim_local(),
        });
    }
    let id2 = CMatrix::identity(2, 2);
    let m = rho.matrix();
    let expect = |op: &CMatrix| -> f64 { (m * op).trace().re };
    let mut x = Vector3::zeros();
    let mut y = Vector3::zeros();
    let mut t = Matrix3::zeros();
    for i in 1..=3 {
        let si = pauli(i);
        x[i - 1] = expect(&tensor_product(&si, &id2));
        y[i - 1] = expect(&tensor_product(&id2, &si));
        for j in 1..=3 {
            t[(i - 1, j - 1)] = expect(&tensor_product(&si, &pauli(j)));
        }
    }
    Ok(BlochForm { x, y, t })
}

/// Rebuild the density matrix from Bloch data; fails with `NotPsd` when the
/// data does not describe a physical state.
pub fn bloch_compose(b: &BlochForm) -> Result<DensityMatrix, StateError> {
    let id2 = CMatrix::identity(2, 2);
    let mut m = CMatrix::identity(4, 4);
    for i in 1..=3 {
        let si = pauli(i);
        m += tensor_product(&si, &id2).scale(b.x[i - 1]);
        m += tensor_product(&id2, &si).scale(b.y[i - 1]);
        for j in 1..=3 {
            m += tensor_product(&si, &pauli(j)).scale(b.t[(i - 1, j - 1)]);
        }
    }
    validate_density(m.scale(0.25), 2)
}

/// The maximally entangled state `(1/sqrt d) sum_n |nn>`.
pub fn make_max_entangled(d: usize) -> PureState {
    let mut amps = CVector::zeros(d * d);
    let a = cr(1.0 / (d as f64).sqrt());
    for n in 0..d {
        amps[n * d + n] = a;
    }
    PureState::new(amps, d).expect("maximally entangled state is normalized")
}

/// Isotropic state `p |Phi+><Phi+| + (1-p) (I - |Phi+><Phi+|) / (d^2 - 1)`.
pub fn make_isotropic(p: f64, d: usize) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::OutOfRange {
            name: "p",
            value: p,
            low: 0.0,
            high: 1.0,
        });
    }
    let phi = make_max_entangled(d).density();
    let dd = d * d;
    let rest = (CMatrix::identity(dd, dd) - phi.matrix()).scale((1.0 - p) / (dd as f64 - 1.0));
    let mat = phi.matrix().scale(p) + rest;
    Ok(DensityMatrix::from_parts_unchecked(d, mat))
}

/// Pure state mixed with colorless noise, `x |psi><psi| + (1-x) I / d^2`.
pub fn make_pure_plus_noise(psi: &PureState, x: f64) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(StateError::OutOfRange {
            name: "x",
            value: x,
            low: 0.0,
            high: 1.0,
        });
    }
    let d = psi.dim_local();
    let dd = d * d;
    let mat =
        psi.density().matrix().scale(x) + CMatrix::identity(dd, dd).scale((1.0 - x) / dd as f64);
    Ok(DensityMatrix::from_parts_unchecked(d, mat))
}

/// The four Bell states in the order Phi+, Phi-, Psi+, Psi-.
pub fn bell_state(k: usize) -> PureState {
    let s = cr(1.0 / 2.0_f64.sqrt());
    let mut amps = CVector::zeros(4);
    match k {
        0 => {
            amps[0] = s;
            amps[3] = s;
        }
        1 => {
            amps[0] = s;
            amps[3] = -s;
        }
        2 => {
            amps[1] = s;
            amps[2] = s;
        }
        3 => {
            amps[1] = s;
            amps[2] = -s;
        }
        _ => panic!("bell state index must be 0..=3"),
    }
    PureState::new(amps, 2).expect("bell states are normalized")
}

/// Two-qubit state diagonal in the Bell basis, weights ordered
/// (Phi+, Phi-, Psi+, Psi-).
pub fn make_bell_diagonal(p: &[f64; 4]) -> Result<DensityMatrix, StateError> {
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(StateError::NotUnitTrace {
            deviation: (sum - 1.0).abs(),
        });
    }
    for &w in p {
        if w < -1e-12 {
            return Err(StateError::OutOfRange {
                name: "bell weight",
                value: w,
                low: 0.0,
                high: 1.0,
            });
        }
    }
    let mut mat = CMatrix::zeros(4, 4);
    for (k, &w) in p.iter().enumerate() {
        mat += bell_state(k).density().matrix().scale(w.max(0.0));
    }
    Ok(DensityMatrix::from_parts_unchecked(2, mat))
}

/// Reference two-qubit state whose correlation matrix has one singular value
/// equal to zero (so the accord vanishes up to rounding of the tabulated
/// entries, at the 3e-8 level) while the concurrence is strictly positive.
/// The (0,3) entry's imaginary unit appears as a trailing `j` in the source
/// table; it is read as the imaginary unit.
pub fn appendix_d_state() -> DensityMatrix {
    let m = CMatrix::from_row_slice(
        4,
        4,
        &[
            cr(0.1547077),
            c(-0.0937756, -0.0097791),
            c(0.0032410, -0.0780971),
            c(-0.0490784, -0.0004913),
            c(-0.0937756, 0.0097791),
            cr(0.2401018),
            cr(0.1384087),
            c(0.0790484, -0.0248949),
            c(0.0032410, 0.0780971),
            cr(0.1384087),
            cr(0.1802319),
            c(-0.0179682, 0.0434231),
            c(-0.0490784, 0.0004913),
            c(0.0790484, 0.0248949),
            c(-0.0179682, -0.0434231),
            cr(0.4249586),
        ],
    );
    validate_density(m, 2).expect("reference state is a valid density matrix")
}

/// Von Neumann entropy in bits, `-sum lambda log2 lambda` with `0 log 0 = 0`.
pub fn von_neumann_entropy(m: &CMatrix) -> f64 {
    let herm = (m + m.adjoint()).scale(0.5);
    hermitian_eigenvalues(&herm)
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Maximally entangled check helper used in tests and seed construction.
pub fn dft_unitary(d: usize) -> UnitaryMatrix {
    UnitaryMatrix::from_matrix_unchecked(fourier_matrix(d))
}

// ---------------------------------------------------------------------------
// State file format: {"d": n, "matrix": [[[re, im], ...], ...]} row-major,
// written with 17 significant digits so values round-trip exactly.
// ---------------------------------------------------------------------------

pub fn state_to_json(rho: &DensityMatrix) -> String {
    let side = rho.total_dim();
    let m = rho.matrix();
    let mut out = String::new();
    out.push_str(&format!("{{\"d\": {}, \"matrix\": [", rho.dim_local()));
    for i in 0..side {
        if i > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for j in 0..side {
            if j > 0 {
                out.push_str(", ");
            }
            let z = m[(i, j)];
            out.push_str(&format!("[{:.16e}, {:.16e}]", z.re, z.im));
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix, StateError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| StateError::BadFile(e.to_string()))?;
    let d = value
        .get("d")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| StateError::BadFile("missing integer field \"d\"".into()))?
        as usize;
    let rows = value
        .get("matrix")
        .and_then(|v| v.as_array())
        .ok_or_else(|| StateError::BadFile("missing array field \"matrix\"".into()))?;
    let side = d * d;
    if rows.len() != side {
        return Err(StateError::BadFile(format!(
            "matrix has {} rows, expected {}",
            rows.len(),
            side
        )));
    }
    let mut mat = CMatrix::zeros(side, side);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| StateError::BadFile(format!("row {i} is not an array")))?;
        if row.len() != side {
            return Err(StateError::BadFile(format!(
                "row {i} has {} entries, expected {side}",
                row.len()
            )));
        }
        for (j, entry) in row.iter().enumerate() {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| StateError::BadFile(format!("entry ({i},{j}) is not [re, im]")))?;
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| StateError::BadFile(format!("entry ({i},{j}) re not a number")))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| StateError::BadFile(format!("entry ({i},{j}) im not a number")))?;
            mat[(i, j)] = c(re, im);
        }
    }
    validate_density(mat, d)
}
