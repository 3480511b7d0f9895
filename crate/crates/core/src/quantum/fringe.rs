use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::math;

use super::{
    bell_state, propagate, Interferometer, JointProbabilities, ModeSet, PulsePhases, PulseTimings,
    QuantumError, TwoParticleState, UnitaryMethod,
};

/// Correlation `E = P(A+B+) + P(A-B-) - P(A+B-) - P(A-B+)`.
pub fn correlation_e(p: &JointProbabilities) -> f64 {
    p.a_plus_b_plus() + p.a_minus_b_minus() - p.a_plus_b_minus() - p.a_minus_b_plus()
}

/// First-harmonic fit of `E(dphi) = mean + visibility * cos(dphi + offset)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    /// Phase offset in (-pi, pi].
    pub offset: f64,
    pub visibility: f64,
    pub mean: f64,
}

impl FringeFit {
    /// The offset, or an error when the visibility is below 1e-6.
    pub fn checked_offset(&self) -> Result<f64, QuantumError> {
        if !(self.visibility >= 1e-6) {
            return Err(QuantumError::FringeVisibilityTooLow { visibility: self.visibility });
        }
        Ok(self.offset)
    }
}

/// Scans `dphi = phi_A - phi_B` over `n_points >= 3` equally spaced values in
/// `[0, 2 pi)` and projects `E` onto its first harmonic.
///
/// `E` has no higher harmonics in `dphi`, so the projection is exact.
pub fn fringe_scan(
    interferometer: &Interferometer,
    modes: &ModeSet,
    state: &TwoParticleState,
    n_points: usize,
) -> FringeFit {
    let n = n_points.max(3);
    let base = interferometer.phases();
    let (mut a, mut b, mut m) = (0.0, 0.0, 0.0);
    for k in 0..n {
        let dphi = 2.0 * PI * (k as f64) / (n as f64);
        let phases = PulsePhases { splitter_a: base.splitter_b + dphi, ..base };
        let (ta, tb) = interferometer.with_phases(phases).mode_set_transforms(modes);
        let e = correlation_e(&propagate(state, &ta, &tb).joint_probabilities());
        a += e * math::cos(dphi);
        b += e * math::sin(dphi);
        m += e;
    }
    let scale = 2.0 / (n as f64);
    let (a, b) = (a * scale, b * scale);
    FringeFit {
        offset: math::wrap_angle(math::atan2(-b, a)),
        visibility: math::hypot(a, b),
        mean: m / (n as f64),
    }
}

/// Phase offset of the `E` fringe for a mode set, relative to `phi_A - phi_B`.
///
/// `FirstOrder` returns the analytic value `-2 pi delta / rabi` (not wrapped).
/// `Exact` fits the fringe of the Bell state and returns a value in (-pi, pi].
pub fn phase_offset(
    modes: &ModeSet,
    timings: &PulseTimings,
    method: UnitaryMethod,
) -> Result<f64, QuantumError> {
    let interferometer = Interferometer::new(*timings, PulsePhases::default(), method)?;
    match method {
        UnitaryMethod::FirstOrder => Ok(-2.0 * PI * modes.detuning() / timings.rabi),
        UnitaryMethod::Exact => {
            fringe_scan(&interferometer, modes, &bell_state(), 64).checked_offset()
        }
    }
}

/// Analyser phases for a CHSH test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Default for ChshSettings {
    fn default() -> Self {
        ChshSettings { a: 0.0, a_prime: FRAC_PI_2, b: FRAC_PI_4, b_prime: -FRAC_PI_4 }
    }
}

impl ChshSettings {
    /// The four `(phi_A, phi_B)` pairs in the order `(a,b), (a,b'), (a',b), (a',b')`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// `S = E(a,b) + E(a,b') + E(a',b) - E(a',b')`.
pub fn chsh_value<F: FnMut(f64, f64) -> f64>(mut e: F, settings: &ChshSettings) -> f64 {
    let [ab, abp, apb, apbp] = settings.pairs();
    e(ab.0, ab.1) + e(abp.0, abp.1) + e(apb.0, apb.1) - e(apbp.0, apbp.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{mixed_state, PAPER_MODE_SETS};

    #[test]
    fn correlation_of_uniform_probabilities_is_zero() {
        let p = JointProbabilities::new([0.25; 4]).unwrap();
        assert_eq!(correlation_e(&p), 0.0);
        let p = JointProbabilities::new([0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(correlation_e(&p), 1.0);
    }

    #[test]
    fn chsh_bounds() {
        let s = ChshSettings::default();
        let quantum = chsh_value(|x, y| math::cos(x - y), &s);
        assert!((quantum - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(chsh_value(|_, _| 0.0, &s), 0.0);
        let v = 0.6;
        let reduced = chsh_value(|x, y| v * math::cos(x - y), &s);
        assert!((reduced - v * 2.0 * core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn resonant_fringe_has_zero_offset_and_full_visibility() {
        let degenerate = ModeSet::from_v_p(25.0, 0).unwrap();
        let i = Interferometer::new(PulseTimings::default(), PulsePhases::default(), UnitaryMethod::Exact)
            .unwrap();
        let fit = fringe_scan(&i, &degenerate, &bell_state(), 16);
        assert!(fit.offset.abs() < 1e-12);
        assert!((fit.visibility - 1.0).abs() < 1e-12);
        assert!(fit.mean.abs() < 1e-12);
    }

    #[test]
    fn mixed_state_has_no_fringe() {
        let i = Interferometer::new(PulseTimings::default(), PulsePhases::default(), UnitaryMethod::Exact)
            .unwrap();
        let degenerate = ModeSet::from_v_p(25.0, 0).unwrap();
        let fit = fringe_scan(&i, &degenerate, &mixed_state(), 16);
        assert!(fit.visibility < 1e-12);
        assert!(matches!(fit.checked_offset(), Err(QuantumError::FringeVisibilityTooLow { .. })));
    }

    #[test]
    fn first_order_scan_matches_analytic_offset() {
        let t = PulseTimings::default();
        let i = Interferometer::new(t, PulsePhases::default(), UnitaryMethod::FirstOrder).unwrap();
        for set in PAPER_MODE_SETS {
            let fit = fringe_scan(&i, &set, &bell_state(), 32);
            let analytic = phase_offset(&set, &t, UnitaryMethod::FirstOrder).unwrap();
            assert!((fit.offset - math::wrap_angle(analytic)).abs() < 1e-12);
            assert!((fit.visibility - 1.0).abs() < 1e-12);
        }
    }
}
