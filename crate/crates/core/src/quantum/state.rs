use num_complex::Complex64;

use crate::linalg::Mat4;
use crate::math;

use super::{QuantumError, TwoModeUnitary};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;

/// Two-particle density matrix on `A (x) B`, index `2a + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParticleState {
    rho: Mat4,
}

impl TwoParticleState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: Mat4) -> Result<Self, QuantumError> {
        if rho.0.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QuantumError::InvalidState("non-finite entry"));
        }
        if rho.hermiticity_defect() > HERMITIAN_TOL {
            return Err(QuantumError::InvalidState("not Hermitian"));
        }
        let tr = rho.trace();
        if math::abs(tr.re - 1.0) > TRACE_TOL || math::abs(tr.im) > TRACE_TOL {
            return Err(QuantumError::InvalidState("trace differs from 1"));
        }
        if !rho.is_positive_with_shift(EIGEN_TOL) {
            return Err(QuantumError::InvalidState("negative eigenvalue"));
        }
        Ok(TwoParticleState { rho })
    }

    pub fn density_matrix(&self) -> &Mat4 {
        &self.rho
    }

    /// Diagonal populations in the order `(A+B+, A+B-, A-B+, A-B-)`.
    pub fn populations(&self) -> [f64; 4] {
        [self.rho.0[0][0].re, self.rho.0[1][1].re, self.rho.0[2][2].re, self.rho.0[3][3].re]
    }

    /// Port-resolved joint probabilities of this state.
    pub fn joint_probabilities(&self) -> JointProbabilities {
        let p = self.populations().map(|x| x.clamp(0.0, 1.0));
        let s: f64 = p.iter().sum();
        JointProbabilities { p: p.map(|x| x / s) }
    }
}

/// Bell state `(|p>_A |-p>_B + |-p'>_A |p'>_B) / sqrt(2)`.
pub fn bell_state() -> TwoParticleState {
    bell_state_weighted(1.0, 1.0)
}

/// `(w1 |p, -p> + w2 |-p', p'>)` normalised, with real non-negative weights.
pub fn bell_state_weighted(w1: f64, w2: f64) -> TwoParticleState {
    let n = math::sqrt(w1 * w1 + w2 * w2);
    let mut v = [Complex64::new(0.0, 0.0); 4];
    v[1] = Complex64::new(w1 / n, 0.0);
    v[2] = Complex64::new(w2 / n, 0.0);
    TwoParticleState { rho: Mat4::outer(&v) }
}

/// Equal incoherent mixture of `|p, -p>` and `|-p', p'>`.
pub fn mixed_state() -> TwoParticleState {
    partially_coherent_state(1.0, 1.0, 0.0)
}

/// Weights `(w1, w2)` as in [`bell_state_weighted`] with the coherence scaled by `overlap` in `[0, 1]`.
pub fn partially_coherent_state(w1: f64, w2: f64, overlap: f64) -> TwoParticleState {
    let n2 = w1 * w1 + w2 * w2;
    let lam = overlap.clamp(0.0, 1.0);
    let mut rho = Mat4::zero();
    rho.0[1][1] = Complex64::new(w1 * w1 / n2, 0.0);
    rho.0[2][2] = Complex64::new(w2 * w2 / n2, 0.0);
    rho.0[1][2] = Complex64::new(lam * w1 * w2 / n2, 0.0);
    rho.0[2][1] = rho.0[1][2];
    TwoParticleState { rho }
}

/// `(T_A (x) T_B) rho (T_A (x) T_B)^dagger`.
pub fn propagate(
    state: &TwoParticleState,
    t_a: &TwoModeUnitary,
    t_b: &TwoModeUnitary,
) -> TwoParticleState {
    let u = t_a.matrix().kron(t_b.matrix());
    TwoParticleState { rho: u * state.rho * u.adjoint() }
}

/// Probability that two atoms leave the degenerate splitter in different
/// ports `C+ = {A+, B+}` and `C- = {A-, B-}`.
pub fn hom_joint_probability(state_out: &TwoParticleState) -> f64 {
    let p = state_out.joint_probabilities();
    p.a_plus_b_minus() + p.a_minus_b_plus()
}

/// Joint detection probabilities `(A+B+, A+B-, A-B+, A-B-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointProbabilities {
    p: [f64; 4],
}

impl JointProbabilities {
    /// Each entry must lie in `[0, 1]` and the sum must be 1 within 1e-9.
    pub fn new(p: [f64; 4]) -> Result<Self, QuantumError> {
        if p.iter().any(|x| !x.is_finite() || *x < -1e-12 || *x > 1.0 + 1e-12) {
            return Err(QuantumError::InvalidProbabilities("entry outside [0, 1]"));
        }
        let s: f64 = p.iter().sum();
        if math::abs(s - 1.0) > 1e-9 {
            return Err(QuantumError::InvalidProbabilities("entries do not sum to 1"));
        }
        Ok(JointProbabilities { p })
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.p
    }

    pub fn a_plus_b_plus(&self) -> f64 {
        self.p[0]
    }

    pub fn a_plus_b_minus(&self) -> f64 {
        self.p[1]
    }

    pub fn a_minus_b_plus(&self) -> f64 {
        self.p[2]
    }

    pub fn a_minus_b_minus(&self) -> f64 {
        self.p[3]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::resonant_unitary;
    use core::f64::consts::PI;

    #[test]
    fn bell_state_is_valid() {
        let b = bell_state();
        assert!(TwoParticleState::new(*b.density_matrix()).is_ok());
        let p = b.populations();
        assert!(p[0] == 0.0 && p[3] == 0.0);
        assert!((p[1] - 0.5).abs() < 1e-15 && (p[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_density_matrices() {
        let mut rho = *bell_state().density_matrix();
        rho.0[1][2] = Complex64::new(0.5, 0.1);
        assert!(TwoParticleState::new(rho).is_err());
        let rho = Mat4::identity().scale(0.5);
        assert!(TwoParticleState::new(rho).is_err());
        let mut rho = Mat4::zero();
        rho.0[0][0] = Complex64::new(1.5, 0.0);
        rho.0[1][1] = Complex64::new(-0.5, 0.0);
        assert!(matches!(TwoParticleState::new(rho), Err(QuantumError::InvalidState("negative eigenvalue"))));
    }

    #[test]
    fn hom_limits() {
        let rabi = 2.0 * PI * 5e3;
        let t = resonant_unitary(rabi, 50e-6, 0.0)
            .then_after(&resonant_unitary(rabi, 100e-6, 0.0));
        let bell = propagate(&bell_state(), &t, &t);
        assert!(hom_joint_probability(&bell) < 1e-14);
        let mixed = propagate(&mixed_state(), &t, &t);
        assert!((hom_joint_probability(&mixed) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn joint_probability_validation() {
        assert!(JointProbabilities::new([0.25; 4]).is_ok());
        assert!(JointProbabilities::new([0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(JointProbabilities::new([0.2; 4]).is_err());
    }
}
