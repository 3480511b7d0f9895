use alloc::vec::Vec;

use crate::detection::{Dataset, IntegrationVolume};

/// Per-shot atom counts in a list of volumes, stored shot-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    n_volumes: usize,
    counts: Vec<u32>,
}

impl CountTable {
    pub fn new(dataset: &Dataset, volumes: &[IntegrationVolume]) -> Self {
        let mut counts = Vec::with_capacity(dataset.len() * volumes.len());
        for shot in &dataset.shots {
            let start = counts.len();
            counts.resize(start + volumes.len(), 0);
            for atom in &shot.atoms {
                for (k, v) in volumes.iter().enumerate() {
                    if v.contains(atom) {
                        counts[start + k] += 1;
                    }
                }
            }
        }
        CountTable { n_volumes: volumes.len(), counts }
    }

    /// Builds a table from explicit rows, each of length `n_volumes`.
    pub fn from_rows(n_volumes: usize, rows: &[&[u32]]) -> Self {
        let mut counts = Vec::with_capacity(rows.len() * n_volumes);
        for r in rows {
            assert_eq!(r.len(), n_volumes, "row length mismatch");
            counts.extend_from_slice(r);
        }
        CountTable { n_volumes, counts }
    }

    pub fn n_volumes(&self) -> usize {
        self.n_volumes
    }

    pub fn n_shots(&self) -> usize {
        self.counts.len().checked_div(self.n_volumes).unwrap_or(0)
    }

    pub fn rows(&self) -> Vec<&[u32]> {
        if self.n_volumes == 0 {
            return Vec::new();
        }
        self.counts.chunks(self.n_volumes).collect()
    }

    /// Rows with a non-zero count in at least one of `cols`.
    pub fn active_rows(&self, cols: &[usize]) -> Vec<&[u32]> {
        if self.n_volumes == 0 {
            return Vec::new();
        }
        self.counts.chunks(self.n_volumes).filter(|r| cols.iter().any(|&c| r[c] > 0)).collect()
    }
}

/// `<n_i>`.
pub fn mean_count(rows: &[&[u32]], i: usize) -> f64 {
    let s: u64 = rows.iter().map(|r| r[i] as u64).sum();
    s as f64 / rows.len() as f64
}

/// `<n_i n_j>`.
pub fn cross_moment(rows: &[&[u32]], i: usize, j: usize) -> f64 {
    let s: u64 = rows.iter().map(|r| r[i] as u64 * r[j] as u64).sum();
    s as f64 / rows.len() as f64
}

/// `<n_i (n_i - 1)>`.
pub fn factorial_moment(rows: &[&[u32]], i: usize) -> f64 {
    let s: u64 = rows
        .iter()
        .map(|r| {
            let n = r[i] as u64;
            n * n.saturating_sub(1)
        })
        .sum();
    s as f64 / rows.len() as f64
}
