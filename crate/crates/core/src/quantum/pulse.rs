use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::linalg::{cis, Mat2};
use crate::math;

use super::QuantumError;

const UNITARY_TOL: f64 = 1e-12;

/// Role of a Bragg pulse in the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseRole {
    /// pi pulse (mirror).
    Deflector,
    /// pi/2 pulse (beam splitter).
    Splitter,
}

/// How pulse unitaries treat the detuning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitaryMethod {
    /// Closed-form solution of the detuned two-level problem.
    #[default]
    Exact,
    /// Free-evolution phase times the resonant rotation.
    FirstOrder,
}

/// A Bragg pulse coupling two momentum modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraggPulse {
    rabi: f64,
    duration: f64,
    phase: f64,
    role: PulseRole,
}

impl BraggPulse {
    /// Builds a pulse; its area `rabi * duration` must match the role within 1e-9.
    pub fn new(rabi: f64, duration: f64, phase: f64, role: PulseRole) -> Result<Self, QuantumError> {
        if !(rabi > 0.0) || !rabi.is_finite() {
            return Err(QuantumError::InvalidPulse("Rabi frequency must be positive"));
        }
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(QuantumError::InvalidPulse("duration must be positive"));
        }
        if !phase.is_finite() {
            return Err(QuantumError::InvalidPulse("phase must be finite"));
        }
        let target = match role {
            PulseRole::Deflector => PI,
            PulseRole::Splitter => FRAC_PI_2,
        };
        if math::abs(rabi * duration - target) > 1e-9 {
            return Err(QuantumError::InvalidPulse("pulse area does not match its role"));
        }
        Ok(BraggPulse { rabi, duration, phase, role })
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn role(&self) -> PulseRole {
        self.role
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// Unitary for a two-mode space with detuning `delta` (rad/s).
    pub fn unitary(&self, delta: f64, method: UnitaryMethod) -> TwoModeUnitary {
        match method {
            UnitaryMethod::Exact => {
                detuned_unitary_exact(self.rabi, self.duration, self.phase, delta)
            }
            UnitaryMethod::FirstOrder => {
                detuned_unitary_first_order(self.rabi, self.duration, self.phase, delta)
            }
        }
    }
}

/// A 2x2 unitary acting on one particle's two modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeUnitary(Mat2);

impl TwoModeUnitary {
    /// Wraps a matrix after checking `U^dagger U = I` within 1e-12.
    pub fn new(m: Mat2) -> Result<Self, QuantumError> {
        let defect = m.unitarity_defect();
        if !(defect <= UNITARY_TOL) {
            return Err(QuantumError::NonUnitary { defect });
        }
        Ok(TwoModeUnitary(m))
    }

    pub(crate) fn from_trusted(m: Mat2) -> Self {
        debug_assert!(m.unitarity_defect() < 1e-10);
        TwoModeUnitary(m)
    }

    pub fn identity() -> Self {
        TwoModeUnitary(Mat2::identity())
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0.get(r, c)
    }

    /// `self * rhs`: apply `rhs` first.
    pub fn then_after(&self, rhs: &TwoModeUnitary) -> TwoModeUnitary {
        TwoModeUnitary(self.0 * rhs.0)
    }

    /// Probability of leaving through port `out` when entering through port `inp`.
    pub fn transition_probability(&self, out: usize, inp: usize) -> f64 {
        self.0.get(out, inp).norm_sqr()
    }
}

/// Resonant pulse: `[[cos, -i e^{-i phi} sin], [-i e^{i phi} sin, cos]]` at angle `rabi t / 2`.
pub fn resonant_unitary(rabi: f64, t: f64, phi: f64) -> TwoModeUnitary {
    let half = 0.5 * rabi * t;
    let (c, s) = (math::cos(half), math::sin(half));
    let mi = Complex64::new(0.0, -1.0);
    TwoModeUnitary::from_trusted(Mat2::new(
        Complex64::new(c, 0.0),
        mi * cis(-phi) * s,
        mi * cis(phi) * s,
        Complex64::new(c, 0.0),
    ))
}

/// Free-evolution phase `e^{-i delta sigma_z t / 2}` times the resonant rotation.
pub fn detuned_unitary_first_order(rabi: f64, t: f64, phi: f64, delta: f64) -> TwoModeUnitary {
    let free = Mat2::diag(cis(-0.5 * delta * t), cis(0.5 * delta * t));
    TwoModeUnitary::from_trusted(free * resonant_unitary(rabi, t, phi).0)
}

/// Exact pulse unitary in the frame where the lattice phase advances as
/// `phi + delta t`.
///
/// Solves `i dpsi/dt = (1/2) [[0, rabi e^{-i(phi + delta t)}], [rabi e^{i(phi + delta t)}, 0]] psi`
/// over `[0, t]`. The result factors as `e^{-i delta sigma_z t/2}` times a
/// generalized Rabi rotation with `W = sqrt(rabi^2 + delta^2)`, and reduces to
/// the resonant unitary at `delta = 0`.
pub fn detuned_unitary_exact(rabi: f64, t: f64, phi: f64, delta: f64) -> TwoModeUnitary {
    let w = math::hypot(rabi, delta);
    let half = 0.5 * w * t;
    let c = math::cos(half);
    // sin(W t / 2) / W, with the W -> 0 limit t / 2
    let s_over_w = if math::abs(half) < 1e-8 { 0.5 * t * (1.0 - half * half / 6.0) } else { math::sin(half) / w };
    let mi = Complex64::new(0.0, -1.0);
    let rot = Mat2::new(
        Complex64::new(c, s_over_w * delta),
        mi * cis(-phi) * (rabi * s_over_w),
        mi * cis(phi) * (rabi * s_over_w),
        Complex64::new(c, -s_over_w * delta),
    );
    let free = Mat2::diag(cis(-0.5 * delta * t), cis(0.5 * delta * t));
    TwoModeUnitary::from_trusted(free * rot)
}

/// Single-particle transform `splitter * deflector`.
pub fn interferometer_transform(
    deflector: &TwoModeUnitary,
    splitter: &TwoModeUnitary,
) -> Result<TwoModeUnitary, QuantumError> {
    TwoModeUnitary::new(splitter.0 * deflector.0)
}

/// Pulse strengths and durations shared by all pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTimings {
    /// Rabi angular frequency in rad/s.
    pub rabi: f64,
    pub deflector_duration: f64,
    pub splitter_duration: f64,
}

impl Default for PulseTimings {
    fn default() -> Self {
        PulseTimings {
            rabi: 2.0 * PI * 5.0e3,
            deflector_duration: 100e-6,
            splitter_duration: 50e-6,
        }
    }
}

/// Laser phases of the three pulses.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PulsePhases {
    pub deflector: f64,
    pub splitter_a: f64,
    pub splitter_b: f64,
}

/// Deflector followed by splitter, with independent splitter phases for A and B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferometer {
    deflector: BraggPulse,
    splitter: BraggPulse,
    phases: PulsePhases,
    method: UnitaryMethod,
}

impl Interferometer {
    pub fn new(
        timings: PulseTimings,
        phases: PulsePhases,
        method: UnitaryMethod,
    ) -> Result<Self, QuantumError> {
        let deflector =
            BraggPulse::new(timings.rabi, timings.deflector_duration, phases.deflector, PulseRole::Deflector)?;
        let splitter =
            BraggPulse::new(timings.rabi, timings.splitter_duration, phases.splitter_a, PulseRole::Splitter)?;
        if !phases.splitter_b.is_finite() {
            return Err(QuantumError::InvalidPulse("phase must be finite"));
        }
        Ok(Interferometer { deflector, splitter, phases, method })
    }

    pub fn timings(&self) -> PulseTimings {
        PulseTimings {
            rabi: self.deflector.rabi(),
            deflector_duration: self.deflector.duration(),
            splitter_duration: self.splitter.duration(),
        }
    }

    pub fn phases(&self) -> PulsePhases {
        self.phases
    }

    pub fn method(&self) -> UnitaryMethod {
        self.method
    }

    pub fn with_phases(mut self, phases: PulsePhases) -> Self {
        self.phases = phases;
        self.deflector = self.deflector.with_phase(phases.deflector);
        self
    }

    pub fn with_method(mut self, method: UnitaryMethod) -> Self {
        self.method = method;
        self
    }

    /// Transform of one particle whose modes have detuning `delta`, using
    /// splitter phase `splitter_phase`.
    pub fn transform(&self, delta: f64, splitter_phase: f64) -> TwoModeUnitary {
        let d = self.deflector.unitary(delta, self.method);
        let s = self.splitter.with_phase(splitter_phase).unitary(delta, self.method);
        TwoModeUnitary(s.0 * d.0)
    }

    /// `(T_A, T_B)` for a pair whose A modes have detuning `delta_a` and whose
    /// B modes have detuning `delta_b`.
    pub fn particle_transforms(&self, delta_a: f64, delta_b: f64) -> (TwoModeUnitary, TwoModeUnitary) {
        (
            self.transform(delta_a, self.phases.splitter_a),
            self.transform(delta_b, self.phases.splitter_b),
        )
    }

    /// `(T_A, T_B)` for a nominal mode set: B sees the opposite detuning.
    pub fn mode_set_transforms(&self, modes: &super::ModeSet) -> (TwoModeUnitary, TwoModeUnitary) {
        let d = modes.detuning();
        self.particle_transforms(d, -d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RABI: f64 = 2.0 * PI * 5.0e3;

    #[test]
    fn resonant_pi_pulse_swaps_modes() {
        let u = resonant_unitary(RABI, 100e-6, 0.0);
        assert!(u.get(0, 0).norm_sqr() < 1e-24);
        assert!((u.get(1, 0) - Complex64::new(0.0, -1.0)).norm_sqr() < 1e-24);
    }

    #[test]
    fn resonant_half_pi_pulse_is_balanced() {
        let u = resonant_unitary(RABI, 50e-6, 0.7);
        for r in 0..2 {
            for c in 0..2 {
                assert!((u.transition_probability(r, c) - 0.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn exact_and_first_order_agree_on_resonance() {
        for phi in [0.0, 0.4, -2.0] {
            for t in [50e-6, 100e-6] {
                let r = resonant_unitary(RABI, t, phi);
                let e = detuned_unitary_exact(RABI, t, phi, 0.0);
                let f = detuned_unitary_first_order(RABI, t, phi, 0.0);
                assert!(r.matrix().max_abs_diff(e.matrix()) < 1e-14);
                assert!(r.matrix().max_abs_diff(f.matrix()) < 1e-14);
            }
        }
    }

    #[test]
    fn exact_without_coupling_is_identity() {
        let u = detuned_unitary_exact(0.0, 1e-4, 0.3, 2.0 * PI * 1e3);
        assert!(u.matrix().max_abs_diff(&Mat2::identity()) < 1e-14);
        assert_eq!(u.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn pulse_role_checks_area() {
        assert!(BraggPulse::new(RABI, 100e-6, 0.0, PulseRole::Deflector).is_ok());
        assert!(BraggPulse::new(RABI, 50e-6, 0.0, PulseRole::Splitter).is_ok());
        assert!(BraggPulse::new(RABI, 60e-6, 0.0, PulseRole::Splitter).is_err());
        assert!(BraggPulse::new(RABI, 50e-6, 0.0, PulseRole::Deflector).is_err());
    }

    #[test]
    fn non_unitary_is_rejected() {
        let m = Mat2::diag(Complex64::new(1.0, 0.0), Complex64::new(1.1, 0.0));
        assert!(matches!(TwoModeUnitary::new(m), Err(QuantumError::NonUnitary { .. })));
        let u = resonant_unitary(RABI, 100e-6, 0.0);
        let bad = TwoModeUnitary(m);
        assert!(interferometer_transform(&u, &bad).is_err());
    }
}
