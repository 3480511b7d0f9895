use std::f64::consts::{FRAC_1_SQRT_2, PI};

use fourmode_core::linalg::Mat2;
use fourmode_core::quantum::{
    bell_state, chsh_value, correlation_e, detuned_unitary_exact, detuned_unitary_first_order,
    hom_joint_probability, mixed_state, partially_coherent_state, phase_offset, propagate,
    resonant_unitary, ChshSettings, Interferometer, ModeSet, PulsePhases, PulseTimings,
    TwoModeUnitary, UnitaryMethod, PAPER_MODE_SETS,
};
use fourmode_core::Complex64;
use proptest::prelude::*;

const RABI: f64 = 2.0 * PI * 5.0e3;
const PI_PULSE: f64 = 100e-6;
const HALF_PI_PULSE: f64 = 50e-6;

/// RK4 solution of i dpsi/dt = H(t) psi for the driven two-mode Hamiltonian
/// H = 1/2 [[0, rabi e^{-i(phi + delta t)}], [rabi e^{i(phi + delta t)}, 0]].
fn rk4_unitary(rabi: f64, t: f64, phi: f64, delta: f64, steps: usize) -> [[Complex64; 2]; 2] {
    let rhs = |time: f64, psi: [Complex64; 2]| {
        let theta = phi + delta * time;
        let off = Complex64::new(0.5 * rabi * theta.cos(), -0.5 * rabi * theta.sin());
        let mi = Complex64::new(0.0, -1.0);
        [mi * off * psi[1], mi * off.conj() * psi[0]]
    };
    let h = t / steps as f64;
    let mut cols = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (c, col) in cols.iter_mut().enumerate() {
        let mut psi = [Complex64::new(0.0, 0.0); 2];
        psi[c] = Complex64::new(1.0, 0.0);
        for k in 0..steps {
            let s = k as f64 * h;
            let add = |a: [Complex64; 2], b: [Complex64; 2], f: f64| [a[0] + b[0] * f, a[1] + b[1] * f];
            let k1 = rhs(s, psi);
            let k2 = rhs(s + 0.5 * h, add(psi, k1, 0.5 * h));
            let k3 = rhs(s + 0.5 * h, add(psi, k2, 0.5 * h));
            let k4 = rhs(s + h, add(psi, k3, h));
            for i in 0..2 {
                psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        *col = psi;
    }
    // cols[c][r] is column c; return row-major
    [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]
}

fn rel_error(u: &TwoModeUnitary, oracle: &[[Complex64; 2]; 2]) -> f64 {
    let mut err: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            err = err.max((u.get(r, c) - oracle[r][c]).norm_sqr().sqrt());
        }
    }
    err
}

#[test]
fn exact_unitary_matches_time_dependent_integration() {
    for ratio in [0.0, 0.1, 0.5, 2.0] {
        for (t, phi) in [(PI_PULSE, 0.3), (HALF_PI_PULSE, -1.1)] {
            let delta = ratio * RABI;
            let u = detuned_unitary_exact(RABI, t, phi, delta);
            let oracle = rk4_unitary(RABI, t, phi, delta, 20_000);
            let err = rel_error(&u, &oracle);
            assert!(err < 1e-9, "delta/rabi = {ratio}, t = {t}: {err}");
        }
    }
}

#[test]
fn exact_and_first_order_agree_on_resonance() {
    for t in [PI_PULSE, HALF_PI_PULSE] {
        let r = resonant_unitary(RABI, t, 0.7);
        let e = detuned_unitary_exact(RABI, t, 0.7, 0.0);
        let f = detuned_unitary_first_order(RABI, t, 0.7, 0.0);
        assert!(r.matrix().max_abs_diff(e.matrix()) < 1e-15);
        assert!(r.matrix().max_abs_diff(f.matrix()) < 1e-15);
    }
}

#[test]
fn first_order_error_is_linear_in_detuning() {
    let dist = |x: f64| {
        let e = detuned_unitary_exact(RABI, PI_PULSE, 0.0, x * RABI);
        let f = detuned_unitary_first_order(RABI, PI_PULSE, 0.0, x * RABI);
        e.matrix().op_distance(f.matrix())
    };
    let mut x = 0.02;
    while x > 1e-4 {
        let (a, b) = (dist(x), dist(0.5 * x));
        assert!(a <= 1.1 * x, "{a} at {x}");
        assert!((a / b - 2.0).abs() < 0.05, "ratio {} at {x}", a / b);
        x *= 0.5;
    }
}

#[test]
fn resonant_pulses_have_textbook_action() {
    let pi = resonant_unitary(RABI, PI_PULSE, 0.0);
    assert!(pi.transition_probability(1, 0) > 1.0 - 1e-15);
    let half = resonant_unitary(RABI, HALF_PI_PULSE, 0.0);
    assert!((half.transition_probability(1, 0) - 0.5).abs() < 1e-15);
    assert!((half.get(0, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
}

/// Amplitude oracle for the Bell state (|A+ B-> + |A- B+>)/sqrt 2.
fn bell_probabilities(ta: &TwoModeUnitary, tb: &TwoModeUnitary) -> [f64; 4] {
    let mut p = [0.0; 4];
    for a in 0..2 {
        for b in 0..2 {
            let amp = (ta.get(a, 0) * tb.get(b, 1) + ta.get(a, 1) * tb.get(b, 0)) * FRAC_1_SQRT_2;
            p[2 * a + b] = amp.norm_sqr();
        }
    }
    p
}

fn e_of(p: [f64; 4]) -> f64 {
    p[0] + p[3] - p[1] - p[2]
}

fn interferometer(method: UnitaryMethod, phi_a: f64, phi_b: f64) -> Interferometer {
    let phases = PulsePhases { deflector: 0.0, splitter_a: phi_a, splitter_b: phi_b };
    Interferometer::new(PulseTimings::default(), phases, method).unwrap()
}

#[test]
fn propagated_bell_state_matches_amplitude_oracle() {
    for modes in PAPER_MODE_SETS {
        for method in [UnitaryMethod::Exact, UnitaryMethod::FirstOrder] {
            for k in 0..12 {
                let dphi = k as f64 * 0.55 - 3.0;
                let interf = interferometer(method, dphi, 0.4);
                let (ta, tb) = interf.mode_set_transforms(&modes);
                let got = propagate(&bell_state(), &ta, &tb).populations();
                let want = bell_probabilities(&ta, &tb);
                for i in 0..4 {
                    assert!((got[i] - want[i]).abs() < 1e-13);
                }
            }
        }
    }
}

#[test]
fn resonant_bell_fringe_is_cosine_and_mixed_state_is_flat() {
    let degenerate = ModeSet::new(25.0, 25.0, 0).unwrap();
    for k in 0..40 {
        let dphi = -PI + k as f64 * 2.0 * PI / 40.0;
        let (ta, tb) = interferometer(UnitaryMethod::Exact, dphi, 0.0).mode_set_transforms(&degenerate);
        let e = correlation_e(&propagate(&bell_state(), &ta, &tb).joint_probabilities());
        assert!((e - dphi.cos()).abs() < 1e-12, "{e} vs {}", dphi.cos());
        let e_mixed = correlation_e(&propagate(&mixed_state(), &ta, &tb).joint_probabilities());
        assert!(e_mixed.abs() < 1e-12);
    }
}

/// Offset of E(dphi) = V cos(dphi + offset) from a dense scan of the amplitude oracle.
fn oracle_offset(modes: &ModeSet, method: UnitaryMethod) -> f64 {
    let n = 360;
    let (mut a, mut b) = (0.0, 0.0);
    for k in 0..n {
        let dphi = 2.0 * PI * k as f64 / n as f64;
        let (ta, tb) = interferometer(method, dphi, 0.0).mode_set_transforms(modes);
        let e = e_of(bell_probabilities(&ta, &tb));
        a += e * dphi.cos();
        b += e * dphi.sin();
    }
    (-b).atan2(a)
}

fn wrapped_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[test]
fn phase_offsets_match_independent_scan() {
    for modes in PAPER_MODE_SETS {
        for method in [UnitaryMethod::Exact, UnitaryMethod::FirstOrder] {
            let got = phase_offset(&modes, &PulseTimings::default(), method).unwrap();
            let want = oracle_offset(&modes, method);
            assert!(wrapped_diff(got, want) < 1e-9, "set {} {method:?}: {got} vs {want}", modes.label());
        }
    }
}

#[test]
fn first_order_offsets_from_constants() {
    // kinetic energy difference of the two modes over hbar, offset = -2 pi delta / rabi
    let (m, hbar) = (6.6464731e-27, 1.054571817e-34);
    for (modes, deg) in PAPER_MODE_SETS.iter().zip([-72.22, -148.05, -220.28]) {
        let (vp, vq) = (modes.v_p() * 1e-3, modes.v_p_prime() * 1e-3);
        let delta = 0.5 * m * (vp * vp - vq * vq) / hbar;
        let want = -2.0 * PI * delta / RABI;
        let got = phase_offset(modes, &PulseTimings::default(), UnitaryMethod::FirstOrder).unwrap();
        assert!((got / want - 1.0).abs() < 1e-12, "{got} vs {want}");
        assert!((got.to_degrees() - deg).abs() < 0.01, "{}", got.to_degrees());
    }
}

#[test]
fn ideal_chsh_reaches_tsirelson_bound() {
    let degenerate = ModeSet::new(25.0, 25.0, 0).unwrap();
    let e = |a: f64, b: f64| {
        let (ta, tb) = interferometer(UnitaryMethod::Exact, a, b).mode_set_transforms(&degenerate);
        correlation_e(&propagate(&bell_state(), &ta, &tb).joint_probabilities())
    };
    let s = chsh_value(e, &ChshSettings::default());
    assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12, "{s}");
    let e_mixed = |a: f64, b: f64| {
        let (ta, tb) = interferometer(UnitaryMethod::Exact, a, b).mode_set_transforms(&degenerate);
        correlation_e(&propagate(&mixed_state(), &ta, &tb).joint_probabilities())
    };
    assert!(chsh_value(e_mixed, &ChshSettings::default()).abs() <= 2.0);
}

#[test]
fn hom_probability_follows_branch_coherence() {
    // degenerate splitter: both particles on the same pair of modes
    let degenerate = ModeSet::new(25.0, 25.0, 0).unwrap();
    let (ta, tb) = interferometer(UnitaryMethod::Exact, 0.0, 0.0).mode_set_transforms(&degenerate);
    let pure = bell_probabilities(&ta, &tb);
    let p_pure = pure[1] + pure[2];
    assert!(p_pure < 1e-15, "{p_pure}");
    for k in 0..=10 {
        let lam = k as f64 / 10.0;
        let p = hom_joint_probability(&propagate(&partially_coherent_state(1.0, 1.0, lam), &ta, &tb));
        // incoherent part contributes 1/2, coherent part p_pure
        let oracle = lam * p_pure + (1.0 - lam) * 0.5;
        assert!((p - oracle).abs() < 1e-13, "{lam}: {p} vs {oracle}");
    }
}

fn arb_method() -> impl Strategy<Value = UnitaryMethod> {
    prop_oneof![Just(UnitaryMethod::Exact), Just(UnitaryMethod::FirstOrder)]
}

proptest! {
    #[test]
    fn pulse_unitaries_are_unitary(
        ratio in -5.0f64..5.0, phi in -PI..PI, t in 1e-6f64..200e-6, method in arb_method(),
    ) {
        let u = match method {
            UnitaryMethod::Exact => detuned_unitary_exact(RABI, t, phi, ratio * RABI),
            UnitaryMethod::FirstOrder => detuned_unitary_first_order(RABI, t, phi, ratio * RABI),
        };
        prop_assert!(u.matrix().unitarity_defect() < 1e-12);
    }

    #[test]
    fn propagated_states_stay_physical(
        w2 in 0.0f64..1.0, lam in 0.0f64..1.0, da in -3.0f64..3.0, db in -3.0f64..3.0,
        pa in -PI..PI, pb in -PI..PI, method in arb_method(),
    ) {
        let interf = interferometer(method, pa, pb);
        let (ta, tb) = interf.particle_transforms(da * RABI, db * RABI);
        let out = propagate(&partially_coherent_state(1.0, w2, lam), &ta, &tb);
        let p = out.populations();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|x| *x >= -1e-14 && *x <= 1.0 + 1e-14));
        prop_assert!(out.density_matrix().hermiticity_defect() < 1e-12);
        let e = correlation_e(&out.joint_probabilities());
        prop_assert!(e.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn composition_preserves_unitarity(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let u = detuned_unitary_exact(RABI, PI_PULSE, 0.1, a * RABI);
        let v = detuned_unitary_exact(RABI, HALF_PI_PULSE, 0.2, b * RABI);
        let w: Mat2 = *v.matrix() * *u.matrix();
        prop_assert!(w.unitarity_defect() < 1e-12);
        prop_assert!(TwoModeUnitary::new(w).is_ok());
    }
}
