//! Quantum correlation measures built on the measurement-coincidence game.
//!
//! Two parties each hold one half of a bipartite state, apply local unitaries
//! and measure in a fixed basis. The first party tries to make the outcomes
//! agree, the second tries to prevent it; the optimized coincidence
//! probability (min over the spoiler, max over the guesser) is the OMCP, and
//! its rescaling to `[0, 1]` is the *accord*.
//!
//! The crate provides:
//!
//! * [`qstate`]: density matrices, pure states, Schmidt and Bloch
//!   decompositions, constructors for the standard state families.
//! * [`exact`]: closed-form OMCP/accord evaluators for the solved state
//!   classes (pure states, two qubits, isotropic states, pure plus noise,
//!   classical states).
//! * [`optimizer`]: direct numerical evaluation of the minimax over local
//!   unitaries, used as the brute-force oracle for every closed form.
//! * [`measures`]: the companion measures used for comparisons: concurrence,
//!   singlet fraction, mutual information, quantum discord and the CHSH
//!   parameter.
//! * [`sampling`]: random-state generators for the scatter experiments,
//!   including the search for entangled states with zero accord.
//! * [`game`]: Monte Carlo simulation of the operational five-step game with
//!   sampled unitaries and (optionally) sampled measurement outcomes.

pub mod exact;
pub mod game;
pub mod linalg;
pub mod measures;
pub mod optimizer;
pub mod qstate;
pub mod sampling;
pub mod streams;

pub use exact::{MeasureResult, Method};
pub use qstate::{BlochForm, DensityMatrix, PureState, SchmidtForm, Subsystem, UnitaryMatrix};
