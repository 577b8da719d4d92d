//! Random-state generators for the scatter experiments and the search for
//! entangled states with zero accord.

use crate::linalg::{c, CMatrix, CVector};
use crate::measures::concurrence;
use crate::qstate::{bloch_compose, BlochForm, DensityMatrix, PureState, StateError};
use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SearchError {
    #[error("no state accepted within {attempts} attempts")]
    NotFound { attempts: usize },
}

/// The two random two-qubit ensembles used in the scatter experiments. Both
/// trace two qubits out of a random four-qubit pure state; they differ in
/// the distribution of that pure state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomEnsemble {
    /// Haar-uniform: normalized complex Gaussian amplitudes.
    HaarComplex,
    /// Normalized real Gaussian amplitudes.
    RealGaussian,
}

/// Haar-uniform pure state of two `n`-dimensional subsystems.
pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState {
    let amps = CVector::from_fn(n * n, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    PureState::normalized(amps, n).expect("gaussian vector is almost surely nonzero")
}

/// Random two-qubit mixed state: draw a four-qubit pure state from the
/// selected ensemble and trace out the last two qubits. With the sixteen
/// amplitudes arranged as a 4x4 matrix `C` (kept pair slow), the reduced
/// state is `C C^dag`.
pub fn random_two_qubit_mixed<R: Rng + ?Sized>(
    rng: &mut R,
    family: RandomEnsemble,
) -> DensityMatrix {
    let coeff = loop {
        let raw = CMatrix::from_fn(4, 4, |_, _| match family {
            RandomEnsemble::HaarComplex => {
                c(rng.sample(StandardNormal), rng.sample(StandardNormal))
            }
            RandomEnsemble::RealGaussian => c(rng.sample(StandardNormal), 0.0),
        });
        let norm = raw.norm();
        if norm > 1e-12 {
            break raw.scale(1.0 / norm);
        }
    };
    let mat = &coeff * coeff.adjoint();
    DensityMatrix::from_parts_unchecked(2, mat)
}

/// Bell-diagonal state with weights drawn uniformly from the 3-simplex
/// (flat Dirichlet via normalized exponentials).
pub fn random_bell_diagonal<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix {
    let mut w = [0.0f64; 4];
    loop {
        let mut total = 0.0;
        for slot in &mut w {
            let u: f64 = rng.random::<f64>();
            *slot = -(1.0 - u).ln();
            total += *slot;
        }
        if total > 1e-12 {
            for slot in &mut w {
                *slot /= total;
            }
            break;
        }
    }
    crate::qstate::make_bell_diagonal(&w).expect("simplex weights form a valid state")
}

/// Haar-distributed rotation on O(3): QR of a real Gaussian matrix with the
/// R diagonal signs folded into Q.
fn random_orthogonal_3<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let g = Matrix3::<f64>::from_fn(|_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..3 {
        if r[(j, j)] < 0.0 {
            for i in 0..3 {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-radius..=radius),
            rng.random_range(-radius..=radius),
            rng.random_range(-radius..=radius),
        );
        if v.norm() <= radius {
            return v;
        }
    }
}

/// Search for a two-qubit state that is entangled yet carries no measurement
/// correlations: the correlation matrix is built as `O1 diag(t1, t2, 0) O2`
/// (zero smallest singular value, hence zero accord by construction), local
/// Bloch vectors are drawn in a ball of radius 0.5, non-PSD compositions are
/// rejected, and the first state with concurrence above 0.01 is returned
/// together with its concurrence.
pub fn zero_accord_entangled_search<R: Rng + ?Sized>(
    rng: &mut R,
    max_attempts: usize,
) -> Result<(DensityMatrix, f64), SearchError> {
    assert!(max_attempts >= 1, "max_attempts must be at least 1");
    for _ in 0..max_attempts {
        let t1: f64 = rng.random_range(0.0..=1.0);
        let t2: f64 = rng.random_range(0.0..=1.0);
        let o1 = random_orthogonal_3(rng);
        let o2 = random_orthogonal_3(rng);
        let t = o1 * Matrix3::from_diagonal(&Vector3::new(t1, t2, 0.0)) * o2;
        let x = random_in_ball(rng, 0.5);
        let y = random_in_ball(rng, 0.5);
        let rho = match bloch_compose(&BlochForm { x, y, t }) {
            Ok(rho) => rho,
            Err(StateError::NotPsd { .. }) => continue,
            Err(e) => unreachable!("bloch composition can only fail the PSD check: {e}"),
        };
        let conc = concurrence(&rho).expect("two-qubit state");
        if conc > 0.01 {
            return Ok((rho, conc));
        }
    }
    Err(SearchError::NotFound {
        attempts: max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::accord_two_qubit;
    use crate::qstate::{bloch_decompose, validate_density, Subsystem};
    use crate::streams::derive_rng;

    #[test]
    fn pure_states_are_normalized_and_validate() {
        let mut rng = derive_rng(1, &[1]);
        for d in 2..=4 {
            let psi = random_pure_state(d, &mut rng);
            assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
            let rho = psi.density();
            assert!(validate_density(rho.matrix().clone(), d).is_ok());
        }
    }

    #[test]
    fn traced_states_validate_and_have_known_mean_purity() {
        let mut rng = derive_rng(2, &[7]);
        let n = 4000;
        let mut mean_purity = 0.0;
        for _ in 0..n {
            let rho = random_two_qubit_mixed(&mut rng, RandomEnsemble::HaarComplex);
            mean_purity += rho.purity() / n as f64;
        }
        // Tracing half of a Haar 16-dimensional pure state gives mean purity
        // (4 + 4) / (16 + 1).
        let expected = 8.0 / 17.0;
        assert!(
            (mean_purity - expected).abs() < 6e-3,
            "mean purity {mean_purity} vs {expected}"
        );
    }

    #[test]
    fn traced_states_pass_validation_for_both_ensembles() {
        let mut rng = derive_rng(3, &[11]);
        for family in [RandomEnsemble::HaarComplex, RandomEnsemble::RealGaussian] {
            for _ in 0..50 {
                let rho = random_two_qubit_mixed(&mut rng, family);
                assert!(validate_density(rho.matrix().clone(), 2).is_ok());
            }
        }
    }

    #[test]
    fn bell_diagonal_draws_have_zero_local_vectors() {
        let mut rng = derive_rng(4, &[13]);
        for _ in 0..50 {
            let rho = random_bell_diagonal(&mut rng);
            assert!(validate_density(rho.matrix().clone(), 2).is_ok());
            let b = bloch_decompose(&rho).unwrap();
            assert!(b.x.norm() < 1e-12 && b.y.norm() < 1e-12);
        }
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = derive_rng(5, &[17]);
        for _ in 0..20 {
            let o = random_orthogonal_3(&mut rng);
            let gram = o.transpose() * o;
            assert!((gram - Matrix3::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn search_finds_entangled_state_with_zero_accord() {
        let mut rng = derive_rng(0, &[0]);
        let (rho, conc) = zero_accord_entangled_search(&mut rng, 10_000).unwrap();
        assert!(conc > 0.01);
        let accord = accord_two_qubit(&rho).unwrap();
        assert!(
            accord <= 1e-9,
            "accord {accord} should vanish by construction"
        );
        // The coincidence game on such a state is pure chance.
        let omcp = crate::exact::omcp_two_qubit(&rho).unwrap().value;
        assert!((omcp - 0.5).abs() < 1e-8);
        // Local data is still nontrivial in general.
        let _ = partial_trace_smoke(&rho);
    }

    fn partial_trace_smoke(rho: &DensityMatrix) -> f64 {
        crate::qstate::partial_trace(rho, Subsystem::A)[(0, 0)].re
    }

    #[test]
    fn reference_zero_accord_state_has_positive_concurrence() {
        let rho = crate::qstate::appendix_d_state();
        let conc = concurrence(&rho).unwrap();
        assert!(conc > 0.0, "concurrence {conc}");
        let accord = accord_two_qubit(&rho).unwrap();
        assert!(accord < 1e-6);
    }
}
