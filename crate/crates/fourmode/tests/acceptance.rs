//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Run with `cargo test -p fourmode --test acceptance -- --nocapture`.

use std::f64::consts::PI;
use std::time::Instant;

use fourmode::commands::{bell, g2, hom, joint, phase};
use fourmode::config::{CoherenceKind, ExperimentConfig};
use fourmode::runner;
use fourmode_core::analysis::{
    g2_profile, hom_from_rows, joint_probability_estimates, reference_sets, ModeQuartet,
};
use fourmode_core::detection::{Dataset, DetectorConfig, FigureVolume, Shot};
use fourmode_core::quantum::{
    bell_state, chsh_value, correlation_e, detuned_unitary_exact, fringe_scan, mixed_state,
    phase_offset, propagate, ChshSettings, Interferometer, ModeSet, PulsePhases, PulseTimings,
    UnitaryMethod, PAPER_MODE_SETS,
};
use fourmode_core::simulate::Experiment;
use fourmode_core::source::Velocity3;
use fourmode_core::Complex64;

fn report(n: u32, pass: bool, detail: &str) {
    println!("[acceptance] criterion {n:>2} {}: {detail}", if pass { "PASS" } else { "FAIL" });
}

fn resonant_interferometer(phi_a: f64, phi_b: f64) -> Interferometer {
    let phases = PulsePhases { deflector: 0.0, splitter_a: phi_a, splitter_b: phi_b };
    Interferometer::new(PulseTimings::default(), phases, UnitaryMethod::Exact).unwrap()
}

fn degenerate() -> ModeSet {
    ModeSet::new(25.0, 25.0, 0).unwrap()
}

/// Default configuration with the gain set for `atoms` per Fig. 4 volume at the mode centre.
fn config_with_occupation(atoms: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    let src = cfg.source.to_core();
    let v = fourmode_core::detection::table_s1_volume(FigureVolume::Fig4, Velocity3::new(0.0, 0.0, 25.0));
    let now = src.expected_atoms_in(&v).unwrap();
    cfg.source.mean_pairs_per_mode *= atoms / now;
    cfg
}

#[test]
fn criterion_01_analytic_fringe_law() {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::default();
    cfg.analysis.phase_scan_points = 100;
    let r = phase::compute(&cfg).unwrap();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for row in r.scan.rows.iter().filter(|row| row[0] == 0usize.into()) {
        let (fourmode::output::Cell::Float(dphi), fourmode::output::Cell::Float(e)) = (&row[2], &row[3]) else {
            panic!("unexpected cell types")
        };
        worst = worst.max((e - dphi.cos()).abs());
        n += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = n == 100 && worst < 1e-12 && secs < 1.0;
    report(1, pass, &format!("max |E - cos dphi| = {worst:.2e} over {n} points in {secs:.3} s"));
    assert!(pass);
}

#[test]
fn criterion_02_mixture_null() {
    let (mut worst_e, mut worst_p): (f64, f64) = (0.0, 0.0);
    for k in 0..100 {
        let dphi = -PI + 2.0 * PI * k as f64 / 100.0;
        let (ta, tb) = resonant_interferometer(dphi, 0.0).mode_set_transforms(&degenerate());
        let p = propagate(&mixed_state(), &ta, &tb).joint_probabilities();
        worst_e = worst_e.max(correlation_e(&p).abs());
        for x in p.as_array() {
            worst_p = worst_p.max((x - 0.25).abs());
        }
    }
    let pass = worst_e < 1e-12 && worst_p < 1e-12;
    report(2, pass, &format!("max |E| = {worst_e:.2e}, max |P - 1/4| = {worst_p:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_03_detuned_offsets() {
    let paper_deg = [-43.0, -94.0, -144.0];
    let timings = PulseTimings::default();
    let mut lines = Vec::new();
    let mut first_ok = true;
    let (mut exact, mut first) = (Vec::new(), Vec::new());
    for m in PAPER_MODE_SETS {
        let f = phase_offset(&m, &timings, UnitaryMethod::FirstOrder).unwrap();
        let want = -2.0 * PI * m.detuning() / timings.rabi;
        // independent check: first-harmonic fit of the first-order fringe
        let interf = Interferometer::new(timings, PulsePhases::default(), UnitaryMethod::FirstOrder).unwrap();
        let fit = fringe_scan(&interf, &m, &bell_state(), 64);
        let wrapped = (fit.offset - want + PI).rem_euclid(2.0 * PI) - PI;
        first_ok &= f == want && wrapped.abs() < 1e-12;
        exact.push(phase_offset(&m, &timings, UnitaryMethod::Exact).unwrap().to_degrees());
        first.push(f.to_degrees());
    }
    let monotone = exact[0] > exact[1] && exact[1] > exact[2] && exact[0] < 0.0;
    let smaller = exact.iter().zip(&first).all(|(e, f)| e.abs() < f.abs());
    let mut within = true;
    for i in 0..3 {
        let d = exact[i] - paper_deg[i];
        within &= d.abs() <= 20.0;
        lines.push(format!(
            "set {}: exact {:.1} deg, first order {:.1} deg, paper {:.0} deg, residual {:+.1} deg",
            i + 1, exact[i], first[i], paper_deg[i], d
        ));
    }
    let pass = first_ok && monotone && smaller && within;
    for l in &lines {
        println!("    {l}");
    }
    report(
        3,
        pass,
        &format!("first order exact: {first_ok}, monotone: {monotone}, below first order: {smaller}, within 20 deg: {within}"),
    );
    assert!(pass);
}

/// RK4 integration of the driven two-mode equation in the lattice frame.
fn rk4(rabi: f64, t: f64, phi: f64, delta: f64, steps: usize) -> [[Complex64; 2]; 2] {
    let mi = Complex64::new(0.0, -1.0);
    let f = |s: f64, y: [Complex64; 2]| {
        let th = phi + delta * s;
        let off = Complex64::new(0.5 * rabi * th.cos(), -0.5 * rabi * th.sin());
        [mi * off * y[1], mi * off.conj() * y[0]]
    };
    let h = t / steps as f64;
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for c in 0..2 {
        let mut y = [Complex64::new(0.0, 0.0); 2];
        y[c] = Complex64::new(1.0, 0.0);
        for k in 0..steps {
            let s = k as f64 * h;
            let k1 = f(s, y);
            let k2 = f(s + 0.5 * h, [y[0] + k1[0] * (0.5 * h), y[1] + k1[1] * (0.5 * h)]);
            let k3 = f(s + 0.5 * h, [y[0] + k2[0] * (0.5 * h), y[1] + k2[1] * (0.5 * h)]);
            let k4 = f(s + h, [y[0] + k3[0] * h, y[1] + k3[1] * h]);
            for i in 0..2 {
                y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        out[0][c] = y[0];
        out[1][c] = y[1];
    }
    out
}

#[test]
fn criterion_04_exact_unitary_oracle() {
    let rabi = PulseTimings::default().rabi;
    let mut worst: f64 = 0.0;
    for ratio in [0.0, 0.1, 0.5, 2.0] {
        for (t, phi) in [(100e-6, 0.0), (50e-6, 0.9)] {
            let u = detuned_unitary_exact(rabi, t, phi, ratio * rabi);
            let o = rk4(rabi, t, phi, ratio * rabi, 20_000);
            for r in 0..2 {
                for c in 0..2 {
                    // entries are bounded by 1, so the operator scale is 1
                    worst = worst.max((u.get(r, c) - o[r][c]).norm_sqr().sqrt());
                }
            }
        }
    }
    let pass = worst < 1e-9;
    report(4, pass, &format!("max relative deviation from RK4 = {worst:.2e}"));
    assert!(pass);
}

fn shot(index: u64, zs: &[f64]) -> Shot {
    Shot { index, atoms: zs.iter().map(|&z| Velocity3::new(0.0, 0.0, z)).collect() }
}

#[test]
fn criterion_05_estimator_hand_oracle() {
    let m = PAPER_MODE_SETS[0];
    let [ap, am, bp, bm] = m.port_velocities();
    let q = ModeQuartet::for_mode_set(&m, FigureVolume::Fig4).unwrap();
    // {n(p) = 1, n(p') = 1} and {n(-p) = 1, n(-p') = 1}
    let ds = Dataset { master_seed: 0, config_digest: String::new(), shots: vec![shot(0, &[ap, bp]), shot(1, &[bm, am])] };
    let p = joint_probability_estimates(&ds, &q).unwrap();
    let two_shot = p.as_array() == [0.5, 0.0, 0.0, 0.5] && correlation_e(&p) == 1.0;
    // every correlator once
    let ds = Dataset {
        master_seed: 0,
        config_digest: String::new(),
        shots: vec![shot(0, &[ap, bp]), shot(1, &[ap, bm]), shot(2, &[am, bp]), shot(3, &[am, bm])],
    };
    let uniform = joint_probability_estimates(&ds, &q).unwrap().as_array() == [0.25; 4];
    let hom = |rows: &[[u32; 2]]| {
        let r: Vec<&[u32]> = rows.iter().map(|r| &r[..]).collect();
        hom_from_rows(&r, 0, 1).unwrap()
    };
    let all_split = hom(&[[1, 1], [1, 1]]) == 1.0;
    let bunched = hom(&[[2, 0], [0, 2]]) == 0.0;
    // enumeration: 2 split ordered pairs out of 6 ordered pairs
    let thirds = hom(&[[1, 1], [2, 0], [0, 2]]) == 1.0 / 3.0;
    let pass = two_shot && uniform && all_split && bunched && thirds;
    report(
        5,
        pass,
        &format!(
            "two-shot E = 1: {two_shot}, uniform 1/4: {uniform}, HOM (1,1) -> 1: {all_split}, \
             (2,0)/(0,2) -> 0: {bunched}, (1,1)/(2,0)/(0,2) -> 1/3: {thirds}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_reference_sets_and_zero_level() {
    let start = Instant::now();
    let combos = reference_sets(3);
    let count_ok = combos.len() == 18 && combos.contains(&[0, 1, 2, 2]) && !combos.contains(&[0, 1, 0, 2]);
    let cfg = ExperimentConfig::default();
    let r = joint::compute(&cfg, None).unwrap();
    let z = r.zero_level.unwrap();
    let secs = start.elapsed().as_secs_f64();
    let null_ok = z.pooled.value.abs() <= 3.0 * z.pooled.sigma;
    let spread_ok = (0.1 / 3.0..=0.3).contains(&z.std);
    let pass = count_ok && null_ok && spread_ok && secs < 120.0;
    report(
        6,
        pass,
        &format!(
            "{} combinations; pooled E = {:.3} +/- {:.3}; spread {:.3}; mean P = {:.3?}; {} shots in {secs:.1} s",
            combos.len(), z.pooled.value, z.pooled.sigma, z.std, z.mean_probabilities, r.shots
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_fig4_analog() {
    let start = Instant::now();
    let mut low = config_with_occupation(0.02);
    low.shots = 500_000;
    let r = joint::compute(&low, None).unwrap();
    let (v, sv) = r.visibility.unwrap();
    let low_ok = v + 3.0 * sv > 0.7;
    for s in &r.sets {
        println!(
            "    low gain set {}: E = {:+.3} +/- {:.3}, V cos(phase) = {:+.3}",
            s.modes.label(), s.correlation.e.value, s.correlation.e.sigma, v * s.fringe_phase.cos()
        );
    }
    let paper = joint::compute(&ExperimentConfig::default(), None).unwrap();
    let far = paper
        .sets
        .iter()
        .max_by(|a, b| a.offset_exact.abs().total_cmp(&b.offset_exact.abs()))
        .unwrap();
    let e = far.correlation.e;
    let paper_ok = e.value.abs() + 3.0 * e.sigma >= 0.4 && (0.1..=0.3).contains(&e.sigma);
    let pass = low_ok && paper_ok;
    report(
        7,
        pass,
        &format!(
            "low gain (0.02 atoms/volume, {} shots): V = {v:.3} +/- {sv:.3}; paper scale set {}: E = {:+.3} +/- {:.3} ({:.1} s)",
            r.shots, far.modes.label(), e.value, e.sigma, start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_g2_structure() {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let r = g2::compute(&cfg, None).unwrap();
    let (lf, sf) = (r.long_fit.unwrap(), r.short_fit.unwrap());
    let (lw, sw) = (lf.sigma.abs(), sf.sigma.abs());
    let (vp, vm, peak) = r.map.peak().unwrap();
    let elongated = lw > 2.0 * sw && (vp + vm).abs() <= 3.0 && (vp - 25.0).abs() <= 5.0;
    let widths = (lw / 9.0 - 1.0).abs() <= 0.2 && (sw / 2.7 - 1.0).abs() <= 0.2;

    // thinning invariance on 1e5 shots, same emission, efficiency 1 and 0.25
    let src = cfg.source.to_core();
    let pair = [(Velocity3::new(0.0, 0.0, 25.0), Velocity3::new(0.0, 0.0, -25.0))];
    let g = |eff: f64| {
        let exp = Experiment { source: src.clone(), detector: DetectorConfig { efficiency: eff, ..Default::default() }, optics: None };
        let ds = runner::run_experiment(&exp, 31, 100_000, "", None).unwrap();
        g2_profile(&ds, FigureVolume::Fig3, &pair, 200, 31).unwrap()[0]
    };
    let (full, thin) = (g(1.0), g(0.25));
    let thin_ok = (full.value - thin.value).abs() <= 3.0 * (full.sigma.powi(2) + thin.sigma.powi(2)).sqrt();
    let pass = elongated && widths && thin_ok;
    report(
        8,
        pass,
        &format!(
            "peak g2 {peak:.2} at ({vp}, {vm}); long width {lw:.2} +/- {:.2}, short width {sw:.2} +/- {:.2}; \
             g2 full {:.3} +/- {:.3} vs thinned {:.3} +/- {:.3} ({:.1} s)",
            lf.errors()[2], sf.errors()[2], full.value, full.sigma, thin.value, thin.sigma,
            start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_hom_dip() {
    let start = Instant::now();
    let mut cfg = config_with_occupation(0.02);
    cfg.analysis.hom_shots_per_point = 400_000;
    let r = hom::compute(&cfg, None).unwrap();
    let d = r.dip.unwrap();
    let closing = cfg.pulses.closing_time_us;
    let located = (d.center - closing).abs() <= cfg.analysis.hom_scan_step_us;
    let pass = located && d.visibility > 0.5;
    for (t, p) in &r.points {
        println!("    t2 = {t:.0} us: P = {:.3} +/- {:.3}", p.value, p.sigma);
    }
    report(
        9,
        pass,
        &format!(
            "dip centre {:.1} +/- {:.1} us (closing {closing} us), visibility {:.3} ({:.1} s)",
            d.center, d.fit.errors()[1], d.visibility, start.elapsed().as_secs_f64()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_chsh() {
    let e = |a: f64, b: f64| {
        let (ta, tb) = resonant_interferometer(a, b).mode_set_transforms(&degenerate());
        correlation_e(&propagate(&bell_state(), &ta, &tb).joint_probabilities())
    };
    let s = chsh_value(e, &ChshSettings::default());
    let analytic_ok = (s - 2.0 * 2f64.sqrt()).abs() < 1e-9;
    let mut cfg = ExperimentConfig::default();
    cfg.source.coherence = CoherenceKind::Entangled;
    cfg.analysis.bell_shots_per_setting = 10_000;
    let r = bell::compute(&cfg, None).unwrap();
    let mc_ok = r.mc_s.value - 3.0 * r.mc_s.sigma > 2.0;
    let pass = analytic_ok && mc_ok;
    report(
        10,
        pass,
        &format!(
            "analytic S = {s:.12} (2 sqrt 2 = {:.12}); Monte Carlo S = {:.3} +/- {:.3} on set {}",
            2.0 * 2f64.sqrt(), r.mc_s.value, r.mc_s.sigma, r.mc_set.label()
        ),
    );
    assert!(pass);
}
