//! `joint-probs`: per-set joint detection probabilities and correlations with
//! bootstrap errors, the reference-set zero level and a visibility fit.

use fourmode_core::analysis::{fit_visibility, set_correlations, zero_level, ModeQuartet, SetCorrelation, ZeroLevel};
use fourmode_core::detection::{Dataset, FigureVolume};
use fourmode_core::quantum::{phase_offset, ModeSet, UnitaryMethod};
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{json_f64, Artifacts, Cell, Table};
use crate::runner;

pub struct SetRow {
    pub modes: ModeSet,
    pub offset_exact: f64,
    pub offset_first_order: f64,
    /// Phase of the expected fringe, `phi_A - phi_B + offset`, for the configured method.
    pub fringe_phase: f64,
    pub correlation: SetCorrelation,
}

pub struct JointReport {
    pub sets: Vec<SetRow>,
    pub zero_level: Option<ZeroLevel>,
    /// `(V, sigma_V)` from `E_i = V cos(fringe_phase_i)`.
    pub visibility: Option<(f64, f64)>,
    pub shots: usize,
}

pub fn analyze(ds: &Dataset, cfg: &ExperimentConfig) -> Result<JointReport, CliError> {
    let sets = cfg.mode_sets()?;
    let timings = cfg.pulses.timings();
    let quartets = sets
        .iter()
        .map(|m| ModeQuartet::for_mode_set(m, FigureVolume::Fig4))
        .collect::<Result<Vec<_>, _>>()?;
    let n = cfg.analysis.bootstrap_resamples;
    let corr = set_correlations(ds, &quartets, n, cfg.master_seed)?;
    let dphi = cfg.pulses.splitter_phase_a_rad - cfg.pulses.splitter_phase_b_rad;
    let mut rows = Vec::with_capacity(sets.len());
    for (m, c) in sets.iter().zip(corr) {
        let q = |method| phase_offset(m, &timings, method).map_err(|e| CliError::Config(e.to_string()));
        let (exact, first) = (q(UnitaryMethod::Exact)?, q(UnitaryMethod::FirstOrder)?);
        let used = match cfg.pulses.method {
            crate::config::MethodKind::Exact => exact,
            crate::config::MethodKind::FirstOrder => first,
        };
        rows.push(SetRow {
            modes: *m,
            offset_exact: exact,
            offset_first_order: first,
            fringe_phase: dphi + used,
            correlation: c,
        });
    }
    let zero = if sets.len() >= 3 {
        Some(zero_level(ds, &sets, FigureVolume::Fig4, n, cfg.master_seed)?)
    } else {
        None
    };
    let pts: Vec<_> = rows.iter().map(|r| (r.fringe_phase, r.correlation.e)).collect();
    Ok(JointReport { visibility: fit_visibility(&pts), sets: rows, zero_level: zero, shots: ds.len() })
}

pub fn compute(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<JointReport, CliError> {
    let exp = super::experiment(cfg, true)?;
    let ds = runner::run_experiment(&exp, cfg.master_seed, cfg.shots, &cfg.digest(), workers)?;
    analyze(&ds, cfg)
}

pub fn write(out: &Artifacts, r: &JointReport) -> Result<(), CliError> {
    let mut t = Table::new(&[
        "set", "v_p_mm_per_s", "v_p_prime_mm_per_s", "offset_exact_deg", "offset_first_order_deg",
        "p_a_plus_b_plus", "p_a_plus_b_minus", "p_a_minus_b_plus", "p_a_minus_b_minus", "e", "e_sigma",
    ]);
    for s in &r.sets {
        let p = s.correlation.probabilities.as_array();
        let mut row = vec![
            Cell::Int(s.modes.label() as i64),
            Cell::Float(s.modes.v_p()),
            Cell::Float(s.modes.v_p_prime()),
            Cell::Float(s.offset_exact.to_degrees()),
            Cell::Float(s.offset_first_order.to_degrees()),
        ];
        row.extend(p.iter().map(|x| Cell::Float(*x)));
        row.push(Cell::Float(s.correlation.e.value));
        row.push(Cell::Float(s.correlation.e.sigma));
        t.push(row);
    }
    out.write_table("joint_probabilities", &t)?;
    let zero = match &r.zero_level {
        Some(z) => {
            let mut t = Table::new(&["i", "j", "k", "l", "e"]);
            for (c, e) in z.combos.iter().zip(&z.e_values) {
                let mut row: Vec<Cell> = c.iter().map(|&x| Cell::Int(x as i64 + 1)).collect();
                row.push(Cell::Float(*e));
                t.push(row);
            }
            out.write_table("reference_sets", &t)?;
            json!({
                "combinations": z.combos.len(),
                "mean": json_f64(z.mean),
                "std": json_f64(z.std),
                "pooled": super::estimate_json(&z.pooled),
                "mean_probabilities": z.mean_probabilities.map(json_f64),
            })
        }
        None => serde_json::Value::Null,
    };
    let sets: Vec<_> = r
        .sets
        .iter()
        .map(|s| {
            json!({
                "set": s.modes.label(),
                "e": super::estimate_json(&s.correlation.e),
                "fringe_phase_deg": json_f64(s.fringe_phase.to_degrees()),
            })
        })
        .collect();
    out.write_summary(json!({
        "shots": r.shots,
        "sets": sets,
        "zero_level": zero,
        "visibility": r.visibility.map(|(v, s)| json!({ "value": json_f64(v), "sigma": json_f64(s) })),
    }))?;
    Ok(())
}

pub fn run(cfg: &ExperimentConfig, dataset: Option<Dataset>, workers: Option<usize>) -> Result<Artifacts, CliError> {
    let out = Artifacts::create(cfg, "joint-probs")?;
    let r = match dataset {
        Some(ds) => {
            out.log(&format!("analysing {} shots from file", ds.len()))?;
            analyze(&ds, cfg)?
        }
        None => {
            out.log(&format!("simulating {} shots", cfg.shots))?;
            compute(cfg, workers)?
        }
    };
    write(&out, &r)?;
    out.log("done")?;
    Ok(out)
}
