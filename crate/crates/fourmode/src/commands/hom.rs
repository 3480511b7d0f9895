//! `hom-scan`: probability of detecting the two atoms of a degenerate pair in
//! different output ports versus the splitter time.

use fourmode_core::analysis::{hom_probability_with_error, hom_scan, AnalysisError, EstimateWithError, HomDip};
use fourmode_core::detection::{table_s1_volume, FigureVolume};
use fourmode_core::seed::{derive_seed, Stream};
use fourmode_core::source::Velocity3;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{json_f64, Artifacts, Cell, Table};
use crate::runner;

pub struct HomReport {
    /// `(splitter time in us, P(C+, C-))`.
    pub points: Vec<(f64, EstimateWithError)>,
    pub dip: Result<HomDip, AnalysisError>,
    pub shots_per_point: u64,
}

/// Splitter times of the scan, inclusive of both ends.
pub fn scan_times(cfg: &ExperimentConfig) -> Vec<f64> {
    let a = &cfg.analysis;
    let n = ((a.hom_scan_stop_us - a.hom_scan_start_us) / a.hom_scan_step_us + 1e-9).floor() as usize + 1;
    (0..n).map(|k| a.hom_scan_start_us + k as f64 * a.hom_scan_step_us).collect()
}

pub fn compute(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<HomReport, CliError> {
    let m = cfg.source.mode_center_mm_per_s;
    let plus = table_s1_volume(FigureVolume::FigS3, Velocity3::new(0.0, 0.0, m));
    let minus = table_s1_volume(FigureVolume::FigS3, Velocity3::new(0.0, 0.0, -m));
    let shots = cfg.analysis.hom_shots_per_point;
    let mut points = Vec::new();
    for (k, t) in scan_times(cfg).into_iter().enumerate() {
        let mut c = cfg.clone();
        c.pulses.splitter_time_us = t;
        let exp = super::experiment(&c, true)?;
        let seed = derive_seed(cfg.master_seed, k as u64, Stream::Scan);
        let ds = runner::run_experiment(&exp, seed, shots, &cfg.digest(), workers)?;
        let p = hom_probability_with_error(&ds, &plus, &minus, cfg.analysis.bootstrap_resamples, seed)?;
        points.push((t, p));
    }
    Ok(HomReport { dip: hom_scan(&points), points, shots_per_point: shots })
}

pub fn write(out: &Artifacts, r: &HomReport) -> Result<(), CliError> {
    let mut t = Table::new(&["splitter_time_us", "p_different_ports", "p_sigma"]);
    for (x, e) in &r.points {
        t.push(vec![Cell::Float(*x), Cell::Float(e.value), Cell::Float(e.sigma)]);
    }
    out.write_table("hom_scan", &t)?;
    let dip = match &r.dip {
        Ok(d) => json!({
            "center_us": json_f64(d.center),
            "center_sigma_us": json_f64(d.fit.errors()[1]),
            "visibility": json_f64(d.visibility),
            "fit": super::fit_json(&d.fit),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    out.write_summary(json!({ "shots_per_point": r.shots_per_point, "dip": dip }))?;
    Ok(())
}

pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<Artifacts, CliError> {
    let out = Artifacts::create(cfg, "hom-scan")?;
    out.log(&format!("scanning {} splitter times", scan_times(cfg).len()))?;
    let r = compute(cfg, workers)?;
    write(&out, &r)?;
    out.log("done")?;
    r.dip.map_err(CliError::from)?;
    Ok(out)
}
