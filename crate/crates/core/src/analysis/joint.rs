use alloc::vec::Vec;

use crate::detection::{table_s1_volume, Dataset, FigureVolume, IntegrationVolume};
use crate::math;
use crate::quantum::{correlation_e, JointProbabilities, ModeSet};
use crate::source::Velocity3;

use super::{bootstrap_sparse, AnalysisError, CountTable, EstimateWithError};

/// Integration volumes for the output ports `A+, A-, B+, B-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeQuartet {
    pub a_plus: IntegrationVolume,
    pub a_minus: IntegrationVolume,
    pub b_plus: IntegrationVolume,
    pub b_minus: IntegrationVolume,
}

impl ModeQuartet {
    /// Fails unless the four volumes are pairwise disjoint.
    pub fn new(
        a_plus: IntegrationVolume,
        a_minus: IntegrationVolume,
        b_plus: IntegrationVolume,
        b_minus: IntegrationVolume,
    ) -> Result<Self, AnalysisError> {
        let q = ModeQuartet { a_plus, a_minus, b_plus, b_minus };
        let v = q.volumes();
        for i in 0..4 {
            for j in (i + 1)..4 {
                if v[i].may_overlap(&v[j]) {
                    return Err(AnalysisError::InvalidInput("quartet volumes overlap"));
                }
            }
        }
        Ok(q)
    }

    /// Ports of one mode set: `A+` at p, `A-` at -p', `B+` at p', `B-` at -p.
    pub fn for_mode_set(modes: &ModeSet, figure: FigureVolume) -> Result<Self, AnalysisError> {
        let [ap, am, bp, bm] = modes.port_velocities().map(|z| on_axis(figure, z));
        Self::new(ap, am, bp, bm)
    }

    /// Cross-set combination `{A+^(i), A-^(j), B+^(k), B-^(l)}` (0-based indices).
    pub fn reference(
        sets: &[ModeSet],
        combo: [usize; 4],
        figure: FigureVolume,
    ) -> Result<Self, AnalysisError> {
        if combo.iter().any(|&c| c >= sets.len()) {
            return Err(AnalysisError::InvalidInput("reference index out of range"));
        }
        let [i, j, k, l] = combo;
        Self::new(
            on_axis(figure, sets[i].port_velocities()[0]),
            on_axis(figure, sets[j].port_velocities()[1]),
            on_axis(figure, sets[k].port_velocities()[2]),
            on_axis(figure, sets[l].port_velocities()[3]),
        )
    }

    pub fn volumes(&self) -> [IntegrationVolume; 4] {
        [self.a_plus, self.a_minus, self.b_plus, self.b_minus]
    }
}

fn on_axis(figure: FigureVolume, z: f64) -> IntegrationVolume {
    table_s1_volume(figure, Velocity3::new(0.0, 0.0, z))
}

/// Lambda-normalised joint probabilities from count columns `[A+, A-, B+, B-]`.
///
/// `None` when all four correlators vanish.
pub fn joint_from_rows(rows: &[&[u32]], cols: [usize; 4]) -> Option<JointProbabilities> {
    let [ap, am, bp, bm] = cols;
    let (mut pp, mut pm, mut mp, mut mm) = (0u64, 0u64, 0u64, 0u64);
    for r in rows {
        let (a, b, c, d) = (r[ap] as u64, r[am] as u64, r[bp] as u64, r[bm] as u64);
        pp += a * c;
        pm += a * d;
        mp += b * c;
        mm += b * d;
    }
    let lambda = pp + pm + mp + mm;
    if lambda == 0 {
        return None;
    }
    let l = lambda as f64;
    JointProbabilities::new([pp as f64 / l, pm as f64 / l, mp as f64 / l, mm as f64 / l]).ok()
}

/// Joint detection probabilities estimated from atom counts in `quartet`.
pub fn joint_probability_estimates(
    dataset: &Dataset,
    quartet: &ModeQuartet,
) -> Result<JointProbabilities, AnalysisError> {
    let table = CountTable::new(dataset, &quartet.volumes());
    joint_from_rows(&table.rows(), [0, 1, 2, 3])
        .ok_or(AnalysisError::InsufficientStatistics("all four correlators vanish"))
}

/// All `(i, j, k, l)` with `i, j` both different from `k` and `l` (0-based).
pub fn reference_sets(n_sets: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for i in 0..n_sets {
        for j in 0..n_sets {
            for k in 0..n_sets {
                for l in 0..n_sets {
                    if i != k && i != l && j != k && j != l {
                        out.push([i, j, k, l]);
                    }
                }
            }
        }
    }
    out
}

/// Joint probabilities and correlation of one quartet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetCorrelation {
    pub probabilities: JointProbabilities,
    pub e: EstimateWithError,
}

/// Probabilities and bootstrapped `E` for each quartet.
pub fn set_correlations(
    dataset: &Dataset,
    quartets: &[ModeQuartet],
    n_resamples: usize,
    seed: u64,
) -> Result<Vec<SetCorrelation>, AnalysisError> {
    let volumes: Vec<IntegrationVolume> = quartets.iter().flat_map(|q| q.volumes()).collect();
    let table = CountTable::new(dataset, &volumes);
    let rows = table.rows();
    let n = table.n_shots();
    quartets
        .iter()
        .enumerate()
        .map(|(q, _)| {
            let cols = [4 * q, 4 * q + 1, 4 * q + 2, 4 * q + 3];
            let probabilities = joint_from_rows(&rows, cols)
                .ok_or(AnalysisError::InsufficientStatistics("all four correlators vanish"))?;
            let active = table.active_rows(&cols);
            let e = bootstrap_sparse(&active, n, n_resamples, seed, |s, _| {
                joint_from_rows(s, cols).map(|p| correlation_e(&p))
            })?;
            Ok(SetCorrelation { probabilities, e })
        })
        .collect()
}

/// Correlations of the cross-set reference combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLevel {
    pub combos: Vec<[usize; 4]>,
    pub e_values: Vec<f64>,
    /// Mean of the per-combination probabilities `(A+B+, A+B-, A-B+, A-B-)`.
    pub mean_probabilities: [f64; 4],
    pub mean: f64,
    /// Sample standard deviation of `e_values`.
    pub std: f64,
    /// Pooled mean with bootstrap error over shots.
    pub pooled: EstimateWithError,
}

/// Reference-set correlations for `sets`, which should all yield `E = 0`.
pub fn zero_level(
    dataset: &Dataset,
    sets: &[ModeSet],
    figure: FigureVolume,
    n_resamples: usize,
    seed: u64,
) -> Result<ZeroLevel, AnalysisError> {
    let combos = reference_sets(sets.len());
    if combos.is_empty() {
        return Err(AnalysisError::InvalidInput("need at least 3 mode sets for reference combinations"));
    }
    for combo in &combos {
        ModeQuartet::reference(sets, *combo, figure)?;
    }
    let volumes: Vec<IntegrationVolume> = sets
        .iter()
        .flat_map(|m| m.port_velocities().map(|z| on_axis(figure, z)))
        .collect();
    let table = CountTable::new(dataset, &volumes);
    let rows = table.rows();
    let cols = |c: &[usize; 4]| [4 * c[0], 4 * c[1] + 1, 4 * c[2] + 2, 4 * c[3] + 3];
    let mut e_values = Vec::with_capacity(combos.len());
    let mut mean_probabilities = [0.0; 4];
    for c in &combos {
        let p = joint_from_rows(&rows, cols(c))
            .ok_or(AnalysisError::InsufficientStatistics("reference correlators vanish"))?;
        for (m, x) in mean_probabilities.iter_mut().zip(p.as_array()) {
            *m += x / combos.len() as f64;
        }
        e_values.push(correlation_e(&p));
    }
    let n = e_values.len() as f64;
    let mean = e_values.iter().sum::<f64>() / n;
    let var = e_values.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    let all: Vec<usize> = (0..volumes.len()).collect();
    let active = table.active_rows(&all);
    let pooled = bootstrap_sparse(&active, table.n_shots(), n_resamples, seed, |s, _| {
        let (mut sum, mut k) = (0.0, 0usize);
        for c in &combos {
            if let Some(p) = joint_from_rows(s, cols(c)) {
                sum += correlation_e(&p);
                k += 1;
            }
        }
        if k > 0 { Some(sum / k as f64) } else { None }
    })?;
    Ok(ZeroLevel { combos, e_values, mean_probabilities, mean, std: math::sqrt(var), pooled })
}

/// Weighted least-squares visibility `V` in `E_i = V cos(theta_i)`, with its error.
pub fn fit_visibility(points: &[(f64, EstimateWithError)]) -> Option<(f64, f64)> {
    let (mut num, mut den) = (0.0, 0.0);
    for (theta, e) in points {
        if !(e.sigma > 0.0) {
            return None;
        }
        let w = 1.0 / (e.sigma * e.sigma);
        let c = math::cos(*theta);
        num += w * e.value * c;
        den += w * c * c;
    }
    if den > 0.0 { Some((num / den, math::sqrt(1.0 / den))) } else { None }
}
