//! `g2-map`: normalised pair correlations without Bragg pulses, with
//! projections along and across the anti-diagonal and their Gaussian fits.

use fourmode_core::analysis::{
    g2_map, g2_profile, gaussian_fit, long_axis_pairs, short_axis_pairs, AnalysisError,
    EstimateWithError, FitPoint, G2Grid, G2Result, GaussianFit,
};
use fourmode_core::detection::{Dataset, FigureVolume};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{Artifacts, Cell, Table};
use crate::runner;

pub struct G2Report {
    pub map: G2Result,
    /// `(v+, g2)` along `v- = -v+`.
    pub long_axis: Vec<(f64, EstimateWithError)>,
    /// `(v+ + v-, g2)` across the anti-diagonal at `v+ - v- = 2 * mode centre`.
    pub short_axis: Vec<(f64, EstimateWithError)>,
    pub long_fit: Result<GaussianFit, AnalysisError>,
    pub short_fit: Result<GaussianFit, AnalysisError>,
    pub shots: usize,
}

fn fit_profile(points: &[(f64, EstimateWithError)]) -> Result<GaussianFit, AnalysisError> {
    let fp: Vec<FitPoint> = points
        .iter()
        .filter(|(_, e)| e.sigma > 0.0)
        .map(|(x, e)| FitPoint { x: *x, y: e.value, err: e.sigma })
        .collect();
    gaussian_fit(&fp, Some(1.0))
}

pub fn analyze(ds: &Dataset, cfg: &ExperimentConfig) -> Result<G2Report, CliError> {
    let a = &cfg.analysis;
    let grid = G2Grid {
        v_plus_start: a.g2_v_plus_start_mm_per_s,
        v_minus_start: a.g2_v_minus_start_mm_per_s,
        step: a.g2_step_mm_per_s,
        n_plus: a.g2_bins,
        n_minus: a.g2_bins,
    };
    let window = if a.g2_window > 1 { Some(a.g2_window) } else { None };
    let map = g2_map(ds, FigureVolume::Fig3, &grid, window)?;
    let n = a.bootstrap_resamples;
    let seed = cfg.master_seed;
    let long_x = &a.long_axis_v_plus_mm_per_s;
    let long = g2_profile(ds, FigureVolume::FigS1Left, &long_axis_pairs(long_x), n, seed)?;
    let short_x = &a.short_axis_sum_mm_per_s;
    let centre = cfg.source.mode_center_mm_per_s;
    let short = g2_profile(ds, FigureVolume::FigS1Right, &short_axis_pairs(short_x, centre), n, seed)?;
    let long_axis: Vec<_> = long_x.iter().copied().zip(long).collect();
    let short_axis: Vec<_> = short_x.iter().copied().zip(short).collect();
    Ok(G2Report {
        long_fit: fit_profile(&long_axis),
        short_fit: fit_profile(&short_axis),
        map,
        long_axis,
        short_axis,
        shots: ds.len(),
    })
}

pub fn compute(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<G2Report, CliError> {
    let exp = super::experiment(cfg, false)?;
    let ds = runner::run_experiment(&exp, cfg.master_seed, cfg.analysis.g2_shots, &cfg.digest(), workers)?;
    analyze(&ds, cfg)
}

fn profile_table(x_name: &str, pts: &[(f64, EstimateWithError)]) -> Table {
    let mut t = Table::new(&[x_name, "g2", "g2_sigma"]);
    for (x, e) in pts {
        t.push(vec![Cell::Float(*x), Cell::Float(e.value), Cell::Float(e.sigma)]);
    }
    t
}

fn fit_value(f: &Result<GaussianFit, AnalysisError>) -> Value {
    match f {
        Ok(f) => super::fit_json(f),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn write(out: &Artifacts, r: &G2Report) -> Result<(), CliError> {
    let mut t = Table::new(&["v_plus_mm_per_s", "v_minus_mm_per_s", "g2"]);
    for (i, vp) in r.map.v_plus.iter().enumerate() {
        for (j, vm) in r.map.v_minus.iter().enumerate() {
            t.push(vec![Cell::Float(*vp), Cell::Float(*vm), r.map.get(i, j).into()]);
        }
    }
    out.write_table("g2_map", &t)?;
    out.write_table("g2_long_axis", &profile_table("v_plus_mm_per_s", &r.long_axis))?;
    out.write_table("g2_short_axis", &profile_table("velocity_sum_mm_per_s", &r.short_axis))?;
    let peak = r.map.peak().map(|(vp, vm, g)| json!({ "v_plus": vp, "v_minus": vm, "g2": g }));
    out.write_summary(json!({
        "shots": r.shots,
        "window": r.map.window,
        "peak": peak,
        "long_axis_fit": fit_value(&r.long_fit),
        "short_axis_fit": fit_value(&r.short_fit),
    }))?;
    Ok(())
}

pub fn run(cfg: &ExperimentConfig, dataset: Option<Dataset>, workers: Option<usize>) -> Result<Artifacts, CliError> {
    let out = Artifacts::create(cfg, "g2-map")?;
    let r = match dataset {
        Some(ds) => {
            out.log(&format!("analysing {} shots from file", ds.len()))?;
            analyze(&ds, cfg)?
        }
        None => {
            out.log(&format!("simulating {} shots", cfg.analysis.g2_shots))?;
            compute(cfg, workers)?
        }
    };
    write(&out, &r)?;
    out.log("done")?;
    r.long_fit.map_err(CliError::from)?;
    r.short_fit.map_err(CliError::from)?;
    Ok(out)
}
