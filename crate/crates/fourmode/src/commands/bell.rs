//! `bell`: CHSH value, analytic for every mode set and by Monte Carlo on
//! single pairs of the first set. Analyser phases are shifted by the set's
//! exact offset so that `E` peaks at `phi_A = phi_B`.

use fourmode_core::analysis::{set_correlations, EstimateWithError, ModeQuartet};
use fourmode_core::detection::FigureVolume;
use fourmode_core::interferometer::Optics;
use fourmode_core::quantum::{
    chsh_value, correlation_e, phase_offset, propagate, ChshSettings, Interferometer, ModeSet,
    PulsePhases, UnitaryMethod,
};
use fourmode_core::seed::{derive_seed, Stream};
use fourmode_core::simulate::SinglePairExperiment;
use fourmode_core::source::pair_state;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{json_f64, Artifacts, Cell, Table};
use crate::runner;

pub struct BellReport {
    pub settings: ChshSettings,
    /// `(set label, S)`, set 0 being the degenerate resonant set.
    pub analytic: Vec<(u8, f64)>,
    pub mc_set: ModeSet,
    /// Analytic and Monte Carlo `E` for the four setting pairs.
    pub mc_e: Vec<(f64, EstimateWithError)>,
    pub mc_s: EstimateWithError,
}

fn settings(cfg: &ExperimentConfig) -> ChshSettings {
    let a = &cfg.analysis;
    ChshSettings { a: a.bell_a_rad, a_prime: a.bell_a_prime_rad, b: a.bell_b_rad, b_prime: a.bell_b_prime_rad }
}

struct Analyser {
    cfg_phases: PulsePhases,
    timings: fourmode_core::quantum::PulseTimings,
    method: UnitaryMethod,
    offset: f64,
}

impl Analyser {
    fn new(cfg: &ExperimentConfig, modes: &ModeSet) -> Result<Self, CliError> {
        let timings = cfg.pulses.timings();
        let method: UnitaryMethod = cfg.pulses.method.into();
        let offset = if modes.detuning() == 0.0 {
            0.0
        } else {
            phase_offset(modes, &timings, method).map_err(|e| CliError::Config(e.to_string()))?
        };
        Ok(Analyser { cfg_phases: cfg.pulses.phases(), timings, method, offset })
    }

    fn interferometer(&self, a: f64, b: f64) -> Result<Interferometer, CliError> {
        let phases = PulsePhases { splitter_a: a - self.offset, splitter_b: b, ..self.cfg_phases };
        Interferometer::new(self.timings, phases, self.method).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn compute(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<BellReport, CliError> {
    let settings = settings(cfg);
    let source = cfg.source.to_core();
    let state = pair_state(&source, 1.0);
    let centre = cfg.source.mode_center_mm_per_s;
    let mut all = vec![ModeSet::new(centre, centre, 0).map_err(|e| CliError::Config(e.to_string()))?];
    let sets = cfg.mode_sets()?;
    all.extend(sets.iter().copied());
    let mut analytic = Vec::new();
    for m in &all {
        let an = Analyser::new(cfg, m)?;
        let mut err = None;
        let s = chsh_value(
            |a, b| match an.interferometer(a, b) {
                Ok(i) => {
                    let (ta, tb) = i.mode_set_transforms(m);
                    correlation_e(&propagate(&state, &ta, &tb).joint_probabilities())
                }
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            },
            &settings,
        );
        if let Some(e) = err {
            return Err(e);
        }
        analytic.push((m.label(), s));
    }

    let mc_set = sets[0];
    let an = Analyser::new(cfg, &mc_set)?;
    let quartet = ModeQuartet::for_mode_set(&mc_set, FigureVolume::Fig4)?;
    let mut mc_e = Vec::new();
    for (k, (a, b)) in settings.pairs().into_iter().enumerate() {
        let interf = an.interferometer(a, b)?;
        let (ta, tb) = interf.mode_set_transforms(&mc_set);
        let exact = correlation_e(&propagate(&state, &ta, &tb).joint_probabilities());
        let exp = SinglePairExperiment {
            modes: mc_set,
            state,
            optics: Optics::new(interf),
            detector: cfg.detector.to_core(),
        };
        let seed = derive_seed(cfg.master_seed, k as u64, Stream::Scan);
        let ds = runner::run_single_pair(&exp, seed, cfg.analysis.bell_shots_per_setting, &cfg.digest(), workers)?;
        let c = set_correlations(&ds, &[quartet], cfg.analysis.bootstrap_resamples, seed)?;
        mc_e.push((exact, c[0].e));
    }
    let e: Vec<f64> = mc_e.iter().map(|(_, e)| e.value).collect();
    let value = e[0] + e[1] + e[2] - e[3];
    let sigma = mc_e.iter().map(|(_, e)| e.sigma * e.sigma).sum::<f64>().sqrt();
    let mc_s = EstimateWithError { value, sigma, n_resamples: cfg.analysis.bootstrap_resamples };
    Ok(BellReport { settings, analytic, mc_set, mc_e, mc_s })
}

pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Artifacts, CliError> {
    let out = Artifacts::create(cfg, "bell")?;
    out.log("computing CHSH value")?;
    let r = compute(cfg, workers)?;
    let mut t = Table::new(&["phi_a_rad", "phi_b_rad", "e_analytic", "e_monte_carlo", "e_sigma"]);
    for ((a, b), (exact, mc)) in r.settings.pairs().iter().zip(&r.mc_e) {
        t.push(vec![Cell::Float(*a), Cell::Float(*b), Cell::Float(*exact), Cell::Float(mc.value), Cell::Float(mc.sigma)]);
    }
    out.write_table("chsh_settings", &t)?;
    let analytic: Vec<_> = r.analytic.iter().map(|(l, s)| json!({ "set": l, "s": json_f64(*s) })).collect();
    out.write_summary(json!({
        "settings": {
            "a": r.settings.a, "a_prime": r.settings.a_prime, "b": r.settings.b, "b_prime": r.settings.b_prime,
        },
        "analytic": analytic,
        "monte_carlo": {
            "set": r.mc_set.label(),
            "shots_per_setting": cfg.analysis.bell_shots_per_setting,
            "s": super::estimate_json(&r.mc_s),
        },
    }))?;
    out.log("done")?;
    Ok(out)
}
