use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::detection::{Dataset, Shot};
use crate::math;
use crate::seed::{shot_rng, Stream};

use super::AnalysisError;

/// Smallest accepted number of bootstrap resamples.
pub const MIN_RESAMPLES: usize = 100;

/// A point estimate with its bootstrap standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub value: f64,
    pub sigma: f64,
    pub n_resamples: usize,
}

/// Resamples `items` with replacement `n_resamples` times.
///
/// `value` is the statistic on the full sample and `sigma` the standard
/// deviation over resamples on which the statistic is defined. Fails when it
/// is undefined on the full sample or on more than 10% of resamples.
pub fn bootstrap<T: Copy, F>(
    items: &[T],
    n_resamples: usize,
    seed: u64,
    mut statistic: F,
) -> Result<EstimateWithError, AnalysisError>
where
    F: FnMut(&[T]) -> Option<f64>,
{
    if n_resamples < MIN_RESAMPLES {
        return Err(AnalysisError::TooFewResamples(n_resamples));
    }
    if items.is_empty() {
        return Err(AnalysisError::InsufficientStatistics("empty sample"));
    }
    let value = statistic(items)
        .ok_or(AnalysisError::InsufficientStatistics("statistic undefined on the full sample"))?;
    let n = items.len();
    let mut buf: Vec<T> = Vec::with_capacity(n);
    let values = (0..n_resamples).filter_map(|r| {
        let mut rng = shot_rng(seed, r as u64, Stream::Bootstrap);
        buf.clear();
        buf.extend((0..n).map(|_| items[rng.random_range(0..n)]));
        statistic(&buf)
    });
    summarize(value, values, n_resamples)
}

/// [`bootstrap`] for statistics that ignore all-zero rows.
///
/// `active` holds the rows that can contribute and the other
/// `n_total - active.len()` rows are inert. Each resample draws how many
/// active rows it contains from `Binomial(n_total, active / n_total)` and then
/// draws those rows, which matches resampling all `n_total` rows. The
/// statistic receives the active rows and the total sample size.
pub fn bootstrap_sparse<T: Copy, F>(
    active: &[T],
    n_total: usize,
    n_resamples: usize,
    seed: u64,
    mut statistic: F,
) -> Result<EstimateWithError, AnalysisError>
where
    F: FnMut(&[T], usize) -> Option<f64>,
{
    if n_resamples < MIN_RESAMPLES {
        return Err(AnalysisError::TooFewResamples(n_resamples));
    }
    if n_total == 0 || active.len() > n_total {
        return Err(AnalysisError::InvalidInput("active rows exceed the sample size"));
    }
    let value = statistic(active, n_total)
        .ok_or(AnalysisError::InsufficientStatistics("statistic undefined on the full sample"))?;
    let k = active.len();
    let binom = Binomial::new(n_total as u64, k as f64 / n_total as f64)
        .map_err(|_| AnalysisError::InvalidInput("bad active fraction"))?;
    let mut buf: Vec<T> = Vec::with_capacity(k * 2 + 8);
    let values = (0..n_resamples).filter_map(|r| {
        let mut rng = shot_rng(seed, r as u64, Stream::Bootstrap);
        let m = binom.sample(&mut rng) as usize;
        buf.clear();
        if k > 0 {
            buf.extend((0..m).map(|_| active[rng.random_range(0..k)]));
        }
        statistic(&buf, n_total)
    });
    summarize(value, values, n_resamples)
}

fn summarize(
    value: f64,
    values: impl Iterator<Item = f64>,
    n_resamples: usize,
) -> Result<EstimateWithError, AnalysisError> {
    let values: Vec<f64> = values.filter(|v| v.is_finite()).collect();
    let defined = values.len();
    let undefined = n_resamples - defined;
    if undefined * 10 > n_resamples {
        return Err(AnalysisError::BootstrapUndefined { undefined, total: n_resamples });
    }
    let mean = values.iter().sum::<f64>() / defined as f64;
    let sum2: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sigma = if defined > 1 { math::sqrt(sum2 / (defined - 1) as f64) } else { 0.0 };
    Ok(EstimateWithError { value, sigma, n_resamples })
}

/// [`bootstrap`] with the shot as resampling unit.
pub fn bootstrap_shots<F>(
    dataset: &Dataset,
    n_resamples: usize,
    seed: u64,
    statistic: F,
) -> Result<EstimateWithError, AnalysisError>
where
    F: FnMut(&[&Shot]) -> Option<f64>,
{
    let shots: Vec<&Shot> = dataset.shots.iter().collect();
    bootstrap(&shots, n_resamples, seed, statistic)
}
