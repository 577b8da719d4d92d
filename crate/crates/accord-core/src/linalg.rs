//! Small complex linear algebra helpers shared across the crate.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Pauli matrix with index 1 = x, 2 = y, 3 = z.
pub fn pauli(i: usize) -> CMatrix {
    match i {
        1 => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        2 => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        3 => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => panic!("pauli index must be 1, 2 or 3"),
    }
}

/// Discrete Fourier transform unitary, `[F]_jk = exp(2 pi i jk / d) / sqrt(d)`.
pub fn fourier_matrix(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| {
        let phase = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
        c(phase.cos(), phase.sin()) * norm
    })
}

/// Largest entrywise absolute difference between two matrices.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise deviation of `U^dag U` from the identity.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let d = u.nrows();
    let gram = u.adjoint() * u;
    let id = CMatrix::identity(d, d);
    max_abs_diff(&gram, &id)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = m
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// Eigendecomposition of a Hermitian matrix: (eigenvalues, eigenvectors as columns).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Positive-semidefinite square root of a Hermitian PSD matrix.
/// Eigenvalues below zero (rounding noise) are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = m.nrows();
    let mut out = CMatrix::zeros(d, d);
    for (k, &lambda) in vals.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        if s > 0.0 {
            let v = vecs.column(k);
            out += (v * v.adjoint()).scale(s);
        }
    }
    out
}

/// Matrix exponential of `i H` for Hermitian `H` (always unitary).
pub fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let d = h.nrows();
    let mut out = CMatrix::zeros(d, d);
    for (k, &lambda) in vals.iter().enumerate() {
        let phase = c(lambda.cos(), lambda.sin());
        let v = vecs.column(k);
        out += (v * v.adjoint()) * phase;
    }
    out
}

/// Unitary polar factor of a square matrix: the maximizer of
/// `Re tr(U^dag G)` over unitaries, `U = P Q^dag` from the SVD `G = P S Q^dag`.
pub fn polar_unitary(g: &CMatrix) -> CMatrix {
    let svd = g.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    u * v_t
}

/// All `d!` permutation matrices for d <= 4; the `d` cyclic shifts otherwise.
pub fn permutation_matrices(d: usize) -> Vec<CMatrix> {
    let perms: Vec<Vec<usize>> = if d <= 4 {
        let mut out = Vec::new();
        let mut items: Vec<usize> = (0..d).collect();
        heap_permutations(&mut items, d, &mut out);
        out
    } else {
        (0..d)
            .map(|shift| (0..d).map(|i| (i + shift) % d).collect())
            .collect()
    };
    perms
        .into_iter()
        .map(|p| CMatrix::from_fn(d, d, |r, col| if p[col] == r { ONE } else { ZERO }))
        .collect()
}

fn heap_permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permutations(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}
