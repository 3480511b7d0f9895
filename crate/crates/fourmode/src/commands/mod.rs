//! Subcommands. Each module has a `compute` step returning a report and a
//! `run` step that also writes the artifacts.

pub mod bell;
pub mod calibrate;
pub mod g2;
pub mod hom;
pub mod joint;
pub mod phase;
pub mod simulate;

use fourmode_core::analysis::{EstimateWithError, GaussianFit};
use fourmode_core::interferometer::{hom_overlap, Optics};
use fourmode_core::simulate::Experiment;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::json_f64;

/// Shot pipeline for `cfg`, with or without the Bragg pulses.
pub fn experiment(cfg: &ExperimentConfig, with_optics: bool) -> Result<Experiment, CliError> {
    let optics = if with_optics {
        let mut o = Optics::new(cfg.pulses.interferometer()?);
        o.overlap = hom_overlap(cfg.splitter_delay(), cfg.source.sigma_auto_mm_per_s);
        Some(o)
    } else {
        None
    };
    let exp = Experiment { source: cfg.source.to_core(), detector: cfg.detector.to_core(), optics };
    exp.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(exp)
}

pub(crate) fn estimate_json(e: &EstimateWithError) -> Value {
    json!({ "value": json_f64(e.value), "sigma": json_f64(e.sigma), "n_resamples": e.n_resamples })
}

pub(crate) fn fit_json(f: &GaussianFit) -> Value {
    let err = f.errors();
    json!({
        "amplitude": json_f64(f.amplitude),
        "amplitude_sigma": json_f64(err[0]),
        "center": json_f64(f.center),
        "center_sigma": json_f64(err[1]),
        "width": json_f64(f.sigma.abs()),
        "width_sigma": json_f64(err[2]),
        "offset": json_f64(f.offset),
        "offset_sigma": json_f64(err[3]),
        "chi2": json_f64(f.chi2),
        "iterations": f.iterations,
    })
}
