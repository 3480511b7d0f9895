//! Experiment configuration file (TOML). Physical quantities carry their unit
//! in the key name.

use std::path::{Path, PathBuf};


use fourmode_core::detection::DetectorConfig;
use fourmode_core::quantum::{
    Interferometer, ModeSet, PulsePhases, PulseTimings, UnitaryMethod, PAPER_MODE_SETS,
};
use fourmode_core::source::{Background, Coherence, SourceConfig, Velocity3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub shots: u64,
    pub source: SourceSection,
    pub detector: DetectorSection,
    pub pulses: PulseSection,
    pub mode_sets: ModeSetSection,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            master_seed: 1,
            shots: 2218,
            source: SourceSection::default(),
            detector: DetectorSection::default(),
            pulses: PulseSection::default(),
            mode_sets: ModeSetSection::default(),
            analysis: AnalysisSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceKind {
    Entangled,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundKind {
    None,
    FlatTop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceSection {
    pub com_velocity_mm_per_s: [f64; 3],
    pub mode_center_mm_per_s: f64,
    pub sigma_long_mm_per_s: f64,
    pub sigma_short_mm_per_s: f64,
    pub sigma_auto_mm_per_s: f64,
    pub transverse_sigma_mm_per_s: f64,
    pub mean_pairs_per_mode: f64,
    pub n_modes: usize,
    pub coherence: CoherenceKind,
    pub asymmetry: f64,
    pub background: BackgroundKind,
    pub background_floor: f64,
}

impl Default for SourceSection {
    fn default() -> Self {
        SourceSection::from_core(&SourceConfig::default())
    }
}

impl SourceSection {
    pub fn from_core(s: &SourceConfig) -> Self {
        let (background, background_floor) = match s.background {
            Background::None => (BackgroundKind::None, 0.0),
            Background::FlatTop { floor } => (BackgroundKind::FlatTop, floor),
        };
        SourceSection {
            com_velocity_mm_per_s: [s.com_velocity.x, s.com_velocity.y, s.com_velocity.z],
            mode_center_mm_per_s: s.mode_center,
            sigma_long_mm_per_s: s.sigma_long,
            sigma_short_mm_per_s: s.sigma_short,
            sigma_auto_mm_per_s: s.sigma_auto,
            transverse_sigma_mm_per_s: s.transverse_sigma,
            mean_pairs_per_mode: s.mean_pairs_per_mode,
            n_modes: s.n_modes,
            coherence: match s.coherence {
                Coherence::Entangled => CoherenceKind::Entangled,
                Coherence::Mixed => CoherenceKind::Mixed,
            },
            asymmetry: s.asymmetry,
            background,
            background_floor,
        }
    }

    pub fn to_core(&self) -> SourceConfig {
        let [x, y, z] = self.com_velocity_mm_per_s;
        SourceConfig {
            com_velocity: Velocity3::new(x, y, z),
            mode_center: self.mode_center_mm_per_s,
            sigma_long: self.sigma_long_mm_per_s,
            sigma_short: self.sigma_short_mm_per_s,
            sigma_auto: self.sigma_auto_mm_per_s,
            transverse_sigma: self.transverse_sigma_mm_per_s,
            mean_pairs_per_mode: self.mean_pairs_per_mode,
            n_modes: self.n_modes,
            coherence: match self.coherence {
                CoherenceKind::Entangled => Coherence::Entangled,
                CoherenceKind::Mixed => Coherence::Mixed,
            },
            asymmetry: self.asymmetry,
            background: match self.background {
                BackgroundKind::None => Background::None,
                BackgroundKind::FlatTop => Background::FlatTop { floor: self.background_floor },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    pub efficiency: f64,
    pub resolution_sigma_mm_per_s: [f64; 3],
}

impl Default for DetectorSection {
    fn default() -> Self {
        let d = DetectorConfig::default();
        let r = d.resolution_sigma;
        DetectorSection { efficiency: d.efficiency, resolution_sigma_mm_per_s: [r.x, r.y, r.z] }
    }
}

impl DetectorSection {
    pub fn to_core(&self) -> DetectorConfig {
        let [x, y, z] = self.resolution_sigma_mm_per_s;
        DetectorConfig { efficiency: self.efficiency, resolution_sigma: Velocity3::new(x, y, z) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Exact,
    FirstOrder,
}

impl From<MethodKind> for UnitaryMethod {
    fn from(m: MethodKind) -> Self {
        match m {
            MethodKind::Exact => UnitaryMethod::Exact,
            MethodKind::FirstOrder => UnitaryMethod::FirstOrder,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    /// Rabi frequency Omega / 2 pi.
    pub rabi_frequency_khz: f64,
    pub deflector_duration_us: f64,
    pub splitter_duration_us: f64,
    pub deflector_phase_rad: f64,
    pub splitter_phase_a_rad: f64,
    pub splitter_phase_b_rad: f64,
    pub method: MethodKind,
    /// Time of the splitter pulse; the pair branches overlap fully at `closing_time_us`.
    pub splitter_time_us: f64,
    pub closing_time_us: f64,
}

impl Default for PulseSection {
    fn default() -> Self {
        PulseSection {
            rabi_frequency_khz: 5.0,
            deflector_duration_us: 100.0,
            splitter_duration_us: 50.0,
            deflector_phase_rad: 0.0,
            splitter_phase_a_rad: 0.0,
            splitter_phase_b_rad: 0.0,
            method: MethodKind::Exact,
            splitter_time_us: 1950.0,
            closing_time_us: 1950.0,
        }
    }
}

impl PulseSection {
    pub fn timings(&self) -> PulseTimings {
        PulseTimings {
            rabi: 2.0 * std::f64::consts::PI * self.rabi_frequency_khz * 1e3,
            deflector_duration: self.deflector_duration_us * 1e-6,
            splitter_duration: self.splitter_duration_us * 1e-6,
        }
    }

    pub fn phases(&self) -> PulsePhases {
        PulsePhases {
            deflector: self.deflector_phase_rad,
            splitter_a: self.splitter_phase_a_rad,
            splitter_b: self.splitter_phase_b_rad,
        }
    }

    pub fn interferometer(&self) -> Result<Interferometer, CliError> {
        Interferometer::new(self.timings(), self.phases(), self.method.into())
            .map_err(|e| CliError::Config(format!("pulses: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeSetSection {
    /// v_p of each set; v_p' = 50 - v_p.
    pub v_p_mm_per_s: Vec<f64>,
}

impl Default for ModeSetSection {
    fn default() -> Self {
        ModeSetSection { v_p_mm_per_s: PAPER_MODE_SETS.iter().map(|s| s.v_p()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub bootstrap_resamples: usize,
    /// Shots for the g2 analysis (free expansion, no Bragg pulses).
    pub g2_shots: u64,
    pub g2_window: usize,
    pub g2_v_plus_start_mm_per_s: f64,
    pub g2_v_minus_start_mm_per_s: f64,
    pub g2_step_mm_per_s: f64,
    pub g2_bins: usize,
    pub long_axis_v_plus_mm_per_s: Vec<f64>,
    pub short_axis_sum_mm_per_s: Vec<f64>,
    pub hom_scan_start_us: f64,
    pub hom_scan_stop_us: f64,
    pub hom_scan_step_us: f64,
    pub hom_shots_per_point: u64,
    pub phase_scan_points: usize,
    pub bell_shots_per_setting: u64,
    pub bell_a_rad: f64,
    pub bell_a_prime_rad: f64,
    pub bell_b_rad: f64,
    pub bell_b_prime_rad: f64,
    /// Mean atom number per Fig. 4 volume targeted by `calibrate-gain`.
    pub calibration_target_atoms: f64,
    pub calibration_shots: u64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        AnalysisSection {
            bootstrap_resamples: 200,
            g2_shots: 200_000,
            g2_window: 3,
            g2_v_plus_start_mm_per_s: 10.0,
            g2_v_minus_start_mm_per_s: -40.0,
            g2_step_mm_per_s: 1.0,
            g2_bins: 31,
            long_axis_v_plus_mm_per_s: (0..17).map(|i| 5.0 + 2.5 * i as f64).collect(),
            short_axis_sum_mm_per_s: (0..17).map(|i| -8.0 + i as f64).collect(),
            hom_scan_start_us: 1650.0,
            hom_scan_stop_us: 2250.0,
            hom_scan_step_us: 50.0,
            hom_shots_per_point: 20_000,
            phase_scan_points: 100,
            bell_shots_per_setting: 10_000,
            bell_a_rad: 0.0,
            bell_a_prime_rad: FRAC_PI_2,
            bell_b_rad: FRAC_PI_4,
            bell_b_prime_rad: -FRAC_PI_4,
            calibration_target_atoms: 0.2,
            calibration_shots: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output root; empty means `fourmode-out`. `--out` and `$FOURMODE_OUT` override it.
    pub dir: String,
    pub format: TableFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: String::new(), format: TableFormat::Csv }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serialises to TOML")
    }

    /// Checks every nested section.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        self.source.to_core().validate().map_err(|e| CliError::Config(format!("source: {e}")))?;
        self.detector.to_core().validate().map_err(|e| CliError::Config(format!("detector: {e}")))?;
        self.pulses.interferometer()?;
        for t in [self.pulses.splitter_time_us, self.pulses.closing_time_us] {
            if !t.is_finite() {
                return bad("pulse times must be finite".into());
            }
        }
        self.mode_sets()?;
        let a = &self.analysis;
        if a.bootstrap_resamples < fourmode_core::analysis::MIN_RESAMPLES {
            return bad(format!(
                "bootstrap_resamples must be at least {}",
                fourmode_core::analysis::MIN_RESAMPLES
            ));
        }
        if a.g2_bins == 0 || !(a.g2_step_mm_per_s > 0.0) {
            return bad("g2 grid needs positive bins and step".into());
        }
        if !(a.hom_scan_step_us > 0.0) || a.hom_scan_stop_us < a.hom_scan_start_us {
            return bad("HOM scan range is empty".into());
        }
        if a.phase_scan_points < 3 {
            return bad("phase_scan_points must be at least 3".into());
        }
        if !(a.calibration_target_atoms > 0.0) {
            return bad("calibration_target_atoms must be positive".into());
        }
        Ok(())
    }

    pub fn mode_sets(&self) -> Result<Vec<ModeSet>, CliError> {
        if self.mode_sets.v_p_mm_per_s.is_empty() {
            return Err(CliError::Config("at least one mode set is required".into()));
        }
        self.mode_sets
            .v_p_mm_per_s
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                ModeSet::from_v_p(v, (i + 1) as u8)
                    .map_err(|e| CliError::Config(format!("mode set {}: {e}", i + 1)))
            })
            .collect()
    }

    /// SHA-256 of the canonical TOML form with the output section reset,
    /// first 16 hex digits.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.output = OutputSection::default();
        let hash = Sha256::digest(c.to_toml_string().as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Output root; `fourmode-out` when unset.
    pub fn output_root(&self) -> PathBuf {
        if self.output.dir.is_empty() {
            PathBuf::from("fourmode-out")
        } else {
            PathBuf::from(&self.output.dir)
        }
    }

    /// Splitter delay from the closing time, in seconds.
    pub fn splitter_delay(&self) -> f64 {
        (self.pulses.splitter_time_us - self.pulses.closing_time_us) * 1e-6
    }
}
