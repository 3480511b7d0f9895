//! `calibrate-gain`: pair number of the central mode that puts the target mean
//! atom number into a Fig. 4 volume at the mode centre.

use fourmode_core::detection::{table_s1_volume, FigureVolume};
use fourmode_core::source::Velocity3;
use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{json_f64, Artifacts};
use crate::runner;

pub struct CalibrationReport {
    pub mean_pairs_per_mode: f64,
    pub expected_atoms: f64,
    /// Monte Carlo mean of emitted atoms in the volume and its standard error.
    pub mc_atoms: (f64, f64),
    pub calibrated: ExperimentConfig,
}

pub fn compute(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<CalibrationReport, CliError> {
    let centre = cfg.source.mode_center_mm_per_s;
    let volume = table_s1_volume(FigureVolume::Fig4, Velocity3::new(0.0, 0.0, centre));
    let target = cfg.analysis.calibration_target_atoms;
    // the expected atom number is proportional to the pair number
    let mut probe = cfg.source.to_core();
    probe.mean_pairs_per_mode = 1.0;
    let per_unit = probe.expected_atoms_in(&volume).map_err(|e| CliError::Config(e.to_string()))?;
    if !(per_unit > 0.0) {
        return Err(CliError::Config("the Fig. 4 volume at the mode centre receives no atoms".into()));
    }
    let mut calibrated = cfg.clone();
    calibrated.source.mean_pairs_per_mode = target / per_unit;
    let source = calibrated.source.to_core();
    let expected = source.expected_atoms_in(&volume).map_err(|e| CliError::Config(e.to_string()))?;

    let exp = super::experiment(&calibrated, false)?;
    let n = cfg.analysis.calibration_shots;
    let counts: Vec<f64> = runner::pool(workers)?.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| exp.emit(cfg.master_seed, i).atoms.iter().filter(|a| volume.contains(a)).count() as f64)
            .collect()
    });
    let mean = counts.iter().sum::<f64>() / n as f64;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
    Ok(CalibrationReport {
        mean_pairs_per_mode: calibrated.source.mean_pairs_per_mode,
        expected_atoms: expected,
        mc_atoms: (mean, (var / n as f64).sqrt()),
        calibrated,
    })
}

pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Artifacts, CliError> {
    let out = Artifacts::create(cfg, "calibrate-gain")?;
    out.log("calibrating")?;
    let r = compute(cfg, workers)?;
    out.write_text("calibrated_config.toml", &r.calibrated.to_toml_string())?;
    out.write_summary(json!({
        "target_atoms_per_volume": cfg.analysis.calibration_target_atoms,
        "mean_pairs_per_mode": json_f64(r.mean_pairs_per_mode),
        "expected_atoms_per_volume": json_f64(r.expected_atoms),
        "monte_carlo_atoms_per_volume": json_f64(r.mc_atoms.0),
        "monte_carlo_sigma": json_f64(r.mc_atoms.1),
        "shots": cfg.analysis.calibration_shots,
        "calibrated_config": "calibrated_config.toml",
    }))?;
    out.log("done")?;
    Ok(out)
}
