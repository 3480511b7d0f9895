//! Two-mode Bragg pulses, two-particle states and interferometer fringes.
//!
//! Particle A lives in the modes `{p, -p'}` and particle B in `{p', -p}`.
//! In each two-mode space index 0 is the upper output port (`+`) and index 1
//! the lower one (`-`). Two-particle vectors use index `2a + b`, i.e. the
//! order `(A+B+, A+B-, A-B+, A-B-)`.

mod fringe;
mod modes;
mod pulse;
mod state;

pub use fringe::{
    chsh_value, correlation_e, fringe_scan, phase_offset, ChshSettings, FringeFit,
};
pub use modes::{detuning_from_velocities, ModeSet, PAPER_MODE_SETS};
pub use pulse::{
    detuned_unitary_exact, detuned_unitary_first_order, interferometer_transform,
    resonant_unitary, BraggPulse, Interferometer, PulsePhases, PulseRole, PulseTimings,
    TwoModeUnitary, UnitaryMethod,
};
pub use state::{
    bell_state, bell_state_weighted, hom_joint_probability, mixed_state, partially_coherent_state,
    propagate, JointProbabilities, TwoParticleState,
};

use thiserror::Error;

/// Errors raised by the quantum layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("velocities must sum to 50 mm/s, got {sum}")]
    VelocitySum { sum: f64 },
    #[error("mode set needs v_p >= 25 mm/s and finite values, got v_p = {v_p}")]
    InvalidModeSet { v_p: f64 },
    #[error("matrix is not unitary (defect {defect:e})")]
    NonUnitary { defect: f64 },
    #[error("invalid pulse: {0}")]
    InvalidPulse(&'static str),
    #[error("invalid density matrix: {0}")]
    InvalidState(&'static str),
    #[error("invalid joint probabilities: {0}")]
    InvalidProbabilities(&'static str),
    #[error("fringe visibility {visibility:e} too low to define a phase offset")]
    FringeVisibilityTooLow { visibility: f64 },
}
