//! Closed-form OMCP and accord evaluators for the state classes where the
//! minimax has an exact answer, plus the optimal unitaries that achieve it.
//!
//! The OMCP is the coincidence probability of the measurement game after the
//! guessing party maximizes over her local unitary and the spoiling party
//! then minimizes over his; it always lies in `[1/d, 1]`. The accord is the
//! affine rescaling `(d/(d-1)) (OMCP - 1/d)`.

use crate::linalg::fourier_matrix;
use crate::qstate::{
    bloch_decompose, DensityMatrix, SchmidtForm, StateError, Subsystem, UnitaryMatrix,
};

/// How a reported measure value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Numerical,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Numerical => "numerical",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// Optimizer record attached to numerically produced values.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// Restart candidates examined (deterministic seeds plus random restarts).
    pub restarts: usize,
    /// Total objective evaluations across the whole run.
    pub iterations: u64,
    /// Best (reported) value.
    pub best_value: f64,
    /// Worst value among the accepted restart results.
    pub worst_value: f64,
    pub optimal_u_a: Option<UnitaryMatrix>,
    pub optimal_u_b: Option<UnitaryMatrix>,
    /// Which subsystem was measured, for the measures that pick a side.
    pub measured_side: Option<Subsystem>,
}

/// A scalar measure value plus the method that produced it.
#[derive(Debug, Clone)]
pub struct MeasureResult {
    pub value: f64,
    pub method: Method,
    pub diagnostics: Option<Box<Diagnostics>>,
}

impl MeasureResult {
    pub fn closed_form(value: f64) -> Self {
        Self {
            value: clamp_unit(value),
            method: Method::ClosedForm,
            diagnostics: None,
        }
    }

    pub fn numerical(value: f64, diagnostics: Diagnostics) -> Self {
        Self {
            value: clamp_unit(value),
            method: Method::Numerical,
            diagnostics: Some(Box::new(diagnostics)),
        }
    }

    pub fn monte_carlo(value: f64) -> Self {
        Self {
            value: clamp_unit(value),
            method: Method::MonteCarlo,
            diagnostics: None,
        }
    }
}

/// Snap values that exceed [0, 1] by no more than 1e-9 back onto the boundary.
fn clamp_unit(value: f64) -> f64 {
    if value < 0.0 && value > -1e-9 {
        0.0
    } else if value > 1.0 && value < 1.0 + 1e-9 {
        1.0
    } else {
        value
    }
}

/// Pure-state OMCP, `(sum_i c_i)^2 / d`; depends only on the Schmidt
/// coefficients.
pub fn omcp_pure(s: &SchmidtForm) -> MeasureResult {
    let sum = s.coeff_sum();
    MeasureResult::closed_form(sum * sum / s.dim_local() as f64)
}

/// Rescale an OMCP value onto [0, 1]: `(d/(d-1)) (omcp - 1/d)`, clamped when
/// within 1e-9 of a boundary.
pub fn accord_from_omcp(omcp: f64, d: usize) -> f64 {
    let d = d as f64;
    clamp_unit(d / (d - 1.0) * (omcp - 1.0 / d))
}

/// Two-qubit OMCP `(1+s)/2` where `s` is the smallest singular value of the
/// Bloch correlation matrix; the accord is `s` itself.
pub fn omcp_two_qubit(rho: &DensityMatrix) -> Result<MeasureResult, StateError> {
    let s = accord_two_qubit(rho)?;
    Ok(MeasureResult::closed_form((1.0 + s) / 2.0))
}

/// Smallest singular value of the 3x3 correlation matrix of a two-qubit state.
pub fn accord_two_qubit(rho: &DensityMatrix) -> Result<f64, StateError> {
    let b = bloch_decompose(rho)?;
    let svals = b.t.singular_values();
    Ok(svals.iter().copied().fold(f64::INFINITY, f64::min).max(0.0))
}

/// Isotropic-state OMCP: piecewise linear in the mixing weight `p` with the
/// kink at `p = 1/d^2`, where both branches meet at `1/d`.
pub fn omcp_isotropic(p: f64, d: usize) -> Result<MeasureResult, StateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::OutOfRange {
            name: "p",
            value: p,
            low: 0.0,
            high: 1.0,
        });
    }
    let df = d as f64;
    let kink = 1.0 / (df * df);
    let slope = (p - kink).abs() / (1.0 - kink);
    let factor = if p < kink { 1.0 / df } else { 1.0 - 1.0 / df };
    Ok(MeasureResult::closed_form(1.0 / df + slope * factor))
}

/// OMCP of a pure state mixed with colorless noise:
/// `x * OMCP(psi) + (1-x)/d`.
pub fn omcp_pure_plus_noise(s: &SchmidtForm, x: f64) -> Result<MeasureResult, StateError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(StateError::OutOfRange {
            name: "x",
            value: x,
            low: 0.0,
            high: 1.0,
        });
    }
    let pure = omcp_pure(s).value;
    Ok(MeasureResult::closed_form(
        x * pure + (1.0 - x) / s.dim_local() as f64,
    ))
}

/// OMCP of any state diagonal in a basis of orthogonal separable states:
/// random chance, `1/d`.
pub fn omcp_classical(d: usize) -> MeasureResult {
    MeasureResult::closed_form(1.0 / d as f64)
}

/// The unitaries achieving the pure-state optimum: the spoiler plays the
/// discrete Fourier transform `[UB]_jk = w_d^{jk} / sqrt(d)` (maximally
/// mixing his basis) and the guesser plays its conjugate.
pub fn optimal_unitaries_pure(d: usize) -> (UnitaryMatrix, UnitaryMatrix) {
    let ub = UnitaryMatrix::from_matrix_unchecked(fourier_matrix(d));
    let ua = ub.conjugate();
    (ua, ub)
}
