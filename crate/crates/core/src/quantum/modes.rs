use crate::constants::{BRAGG_VELOCITY_SUM, DETUNING_PER_MM_S, MODE_CENTER};
use crate::math;

use super::QuantumError;

/// A mode set `{p, p', -p, -p'}` with `v_p + v_p' = 50 mm/s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSet {
    v_p: f64,
    v_p_prime: f64,
    label: u8,
}

/// The three mode sets used in the experiment (v_p = 27.0, 29.1, 31.1 mm/s).
pub const PAPER_MODE_SETS: [ModeSet; 3] = [
    ModeSet { v_p: 27.0, v_p_prime: 23.0, label: 1 },
    ModeSet { v_p: 29.1, v_p_prime: 20.9, label: 2 },
    ModeSet { v_p: 31.1, v_p_prime: 18.9, label: 3 },
];

impl ModeSet {
    /// Builds a mode set; fails unless `v_p + v_p' = 50` within 1e-9 and `v_p >= 25`.
    pub fn new(v_p: f64, v_p_prime: f64, label: u8) -> Result<Self, QuantumError> {
        if !v_p.is_finite() || !v_p_prime.is_finite() {
            return Err(QuantumError::InvalidModeSet { v_p });
        }
        let sum = v_p + v_p_prime;
        if math::abs(sum - BRAGG_VELOCITY_SUM) > 1e-9 {
            return Err(QuantumError::VelocitySum { sum });
        }
        if v_p < MODE_CENTER {
            return Err(QuantumError::InvalidModeSet { v_p });
        }
        Ok(ModeSet { v_p, v_p_prime, label })
    }

    /// Mode set with `v_p' = 50 - v_p`.
    pub fn from_v_p(v_p: f64, label: u8) -> Result<Self, QuantumError> {
        Self::new(v_p, BRAGG_VELOCITY_SUM - v_p, label)
    }

    pub fn v_p(&self) -> f64 {
        self.v_p
    }

    pub fn v_p_prime(&self) -> f64 {
        self.v_p_prime
    }

    pub fn label(&self) -> u8 {
        self.label
    }

    /// Detuning delta in rad/s (positive for v_p > 25).
    pub fn detuning(&self) -> f64 {
        DETUNING_PER_MM_S * (self.v_p - MODE_CENTER)
    }

    /// Output-port velocities along z: `[A+, A-, B+, B-] = [p, -p', p', -p]`.
    pub fn port_velocities(&self) -> [f64; 4] {
        [self.v_p, -self.v_p_prime, self.v_p_prime, -self.v_p]
    }
}

/// delta = m (v_p^2 - v_p'^2) / (2 hbar) for a pair of velocities summing to 50 mm/s.
pub fn detuning_from_velocities(v_p: f64, v_p_prime: f64) -> Result<f64, QuantumError> {
    let sum = v_p + v_p_prime;
    if !sum.is_finite() || math::abs(sum - BRAGG_VELOCITY_SUM) > 1e-6 {
        return Err(QuantumError::VelocitySum { sum });
    }
    use crate::constants::{HBAR_J_S, HELIUM4_MASS_KG, MM_PER_S};
    let (a, b) = (v_p * MM_PER_S, v_p_prime * MM_PER_S);
    Ok(HELIUM4_MASS_KG * (a * a - b * b) / (2.0 * HBAR_J_S))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn degenerate_pair_has_zero_detuning() {
        assert_eq!(detuning_from_velocities(25.0, 25.0).unwrap(), 0.0);
    }

    #[test]
    fn mode_set_detunings_follow_from_codata_values() {
        // hand values: m (v_p - v_p') * 0.05 / (2 hbar) / 2 pi
        let expected_hz = [1003.08, 2056.31, 3059.39];
        for (set, hz) in PAPER_MODE_SETS.iter().zip(expected_hz) {
            let d = detuning_from_velocities(set.v_p(), set.v_p_prime()).unwrap();
            assert!((d / (2.0 * PI) - hz).abs() < 0.01, "{} vs {}", d / (2.0 * PI), hz);
            assert!((set.detuning() - d).abs() < 1e-9 * d);
        }
    }

    #[test]
    fn rejects_bad_sum() {
        assert!(matches!(
            detuning_from_velocities(27.0, 24.0),
            Err(QuantumError::VelocitySum { .. })
        ));
        assert!(ModeSet::new(27.0, 23.1, 1).is_err());
        assert!(ModeSet::new(24.0, 26.0, 1).is_err());
    }

    #[test]
    fn paper_sets_are_valid() {
        for s in PAPER_MODE_SETS {
            assert!(ModeSet::new(s.v_p(), s.v_p_prime(), s.label()).is_ok());
        }
    }
}
