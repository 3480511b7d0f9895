use alloc::vec::Vec;

use crate::detection::{table_s1_volume, Dataset, FigureVolume, IntegrationVolume};
use crate::source::Velocity3;

use super::{bootstrap_sparse, cross_moment, mean_count, AnalysisError, CountTable, EstimateWithError};

/// `<n_i n_j> / (<n_i> <n_j>)`, or `None` for a zero denominator.
pub fn g2_from_rows(rows: &[&[u32]], i: usize, j: usize) -> Option<f64> {
    if rows.is_empty() {
        return None;
    }
    let d = mean_count(rows, i) * mean_count(rows, j);
    if d > 0.0 { Some(cross_moment(rows, i, j) / d) } else { None }
}

/// [`g2_from_rows`] over the shots with a count in `i` or `j`, out of `n_total` shots.
pub fn g2_from_active(rows: &[&[u32]], n_total: usize, i: usize, j: usize) -> Option<f64> {
    let (mut a, mut b, mut ab) = (0u64, 0u64, 0u64);
    for r in rows {
        let (x, y) = (r[i] as u64, r[j] as u64);
        a += x;
        b += y;
        ab += x * y;
    }
    if a == 0 || b == 0 {
        return None;
    }
    Some(n_total as f64 * ab as f64 / (a as f64 * b as f64))
}

/// Normalised cross-correlation of the counts in two volumes.
pub fn g2_cross(
    dataset: &Dataset,
    vol_plus: &IntegrationVolume,
    vol_minus: &IntegrationVolume,
) -> Result<f64, AnalysisError> {
    if dataset.len() < 2 {
        return Err(AnalysisError::InsufficientStatistics("g2 needs at least 2 shots"));
    }
    let table = CountTable::new(dataset, &[*vol_plus, *vol_minus]);
    g2_from_rows(&table.rows(), 0, 1)
        .ok_or(AnalysisError::InsufficientStatistics("empty volume in g2 denominator"))
}

/// Bin centres of a g2 map along z: `v+` rows and `v-` columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Grid {
    pub v_plus_start: f64,
    pub v_minus_start: f64,
    pub step: f64,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl Default for G2Grid {
    fn default() -> Self {
        G2Grid { v_plus_start: 10.0, v_minus_start: -40.0, step: 1.0, n_plus: 31, n_minus: 31 }
    }
}

impl G2Grid {
    pub fn v_plus(&self) -> Vec<f64> {
        (0..self.n_plus).map(|i| self.v_plus_start + self.step * i as f64).collect()
    }

    pub fn v_minus(&self) -> Vec<f64> {
        (0..self.n_minus).map(|j| self.v_minus_start + self.step * j as f64).collect()
    }
}

/// g2 on a `(v+, v-)` grid. `values[i * n_minus + j]` is `None` where undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Result {
    pub v_plus: Vec<f64>,
    pub v_minus: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub window: Option<usize>,
}

impl G2Result {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.v_minus.len() + j]
    }

    /// Position and value of the largest defined entry.
    pub fn peak(&self) -> Option<(f64, f64, f64)> {
        let m = self.v_minus.len();
        self.values
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|x| (k, x)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, x)| (self.v_plus[k / m], self.v_minus[k % m], x))
    }
}

/// g2 map with volumes of `figure` centred on the z axis.
///
/// With `window = Some(w)` each bin is replaced by the mean of the defined
/// bins in the surrounding `w x w` block (average of ratios).
pub fn g2_map(
    dataset: &Dataset,
    figure: FigureVolume,
    grid: &G2Grid,
    window: Option<usize>,
) -> Result<G2Result, AnalysisError> {
    if dataset.len() < 2 {
        return Err(AnalysisError::InsufficientStatistics("g2 needs at least 2 shots"));
    }
    let vp = grid.v_plus();
    let vm = grid.v_minus();
    let volumes: Vec<IntegrationVolume> = vp
        .iter()
        .chain(vm.iter())
        .map(|&z| table_s1_volume(figure, Velocity3::new(0.0, 0.0, z)))
        .collect();
    let table = CountTable::new(dataset, &volumes);
    let rows = table.rows();
    let (np, nm) = (vp.len(), vm.len());
    let mut raw = Vec::with_capacity(np * nm);
    for i in 0..np {
        for j in 0..nm {
            raw.push(g2_from_rows(&rows, i, np + j));
        }
    }
    let values = match window {
        Some(w) if w > 1 => sliding_average(&raw, np, nm, w),
        _ => raw,
    };
    Ok(G2Result { v_plus: vp, v_minus: vm, values, window })
}

fn sliding_average(raw: &[Option<f64>], np: usize, nm: usize, w: usize) -> Vec<Option<f64>> {
    let h = (w / 2) as isize;
    let mut out = Vec::with_capacity(raw.len());
    for i in 0..np as isize {
        for j in 0..nm as isize {
            let (mut s, mut n) = (0.0, 0usize);
            for di in -h..=h {
                for dj in -h..=h {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= np as isize || b >= nm as isize {
                        continue;
                    }
                    if let Some(v) = raw[a as usize * nm + b as usize] {
                        s += v;
                        n += 1;
                    }
                }
            }
            out.push(if n > 0 { Some(s / n as f64) } else { None });
        }
    }
    out
}

/// Volume centres `(v, -v)` along the anti-diagonal, one per `v+` value.
pub fn long_axis_pairs(v_plus: &[f64]) -> Vec<(Velocity3, Velocity3)> {
    v_plus
        .iter()
        .map(|&v| (Velocity3::new(0.0, 0.0, v), Velocity3::new(0.0, 0.0, -v)))
        .collect()
}

/// Volume centres `(center + s/2, -center + s/2)` across the anti-diagonal,
/// one per velocity sum `s`.
pub fn short_axis_pairs(sums: &[f64], center: f64) -> Vec<(Velocity3, Velocity3)> {
    sums.iter()
        .map(|&s| {
            (Velocity3::new(0.0, 0.0, center + 0.5 * s), Velocity3::new(0.0, 0.0, -center + 0.5 * s))
        })
        .collect()
}

/// g2 with bootstrap errors at each pair of volume centres.
pub fn g2_profile(
    dataset: &Dataset,
    figure: FigureVolume,
    pairs: &[(Velocity3, Velocity3)],
    n_resamples: usize,
    seed: u64,
) -> Result<Vec<EstimateWithError>, AnalysisError> {
    let volumes: Vec<IntegrationVolume> = pairs
        .iter()
        .flat_map(|(a, b)| [table_s1_volume(figure, *a), table_s1_volume(figure, *b)])
        .collect();
    let table = CountTable::new(dataset, &volumes);
    (0..pairs.len())
        .map(|k| {
            let (i, j) = (2 * k, 2 * k + 1);
            let active = table.active_rows(&[i, j]);
            bootstrap_sparse(&active, table.n_shots(), n_resamples, seed, |s, n| g2_from_active(s, n, i, j))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sliding_average_skips_undefined() {
        let raw = [Some(1.0), None, Some(3.0), Some(5.0)];
        let out = sliding_average(&raw, 2, 2, 3);
        assert!(out.iter().all(|v| *v == Some(3.0)));
    }

    #[test]
    fn independent_rows_give_unity() {
        let rows: Vec<[u32; 2]> = (0..4).flat_map(|a| (0..4).map(move |b| [a, b])).collect();
        let refs: Vec<&[u32]> = rows.iter().map(|r| &r[..]).collect();
        assert!((g2_from_rows(&refs, 0, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_volume_is_undefined() {
        let rows = [[0u32, 1], [0, 2]];
        let refs: Vec<&[u32]> = rows.iter().map(|r| &r[..]).collect();
        assert_eq!(g2_from_rows(&refs, 0, 1), None);
    }
}
