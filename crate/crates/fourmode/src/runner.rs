//! Parallel shot generation. Each shot draws from its own seeded streams, so
//! the result does not depend on the number of workers.

use fourmode_core::detection::Dataset;
use fourmode_core::simulate::{Experiment, SinglePairExperiment};
use rayon::prelude::*;

use crate::error::CliError;

/// Thread pool capped at `workers` threads (rayon's default when `None`).
pub fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Other(e.to_string()))
}

pub fn run_experiment(
    exp: &Experiment,
    master_seed: u64,
    n_shots: u64,
    config_digest: &str,
    workers: Option<usize>,
) -> Result<Dataset, CliError> {
    exp.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let shots = pool(workers)?.install(|| (0..n_shots).into_par_iter().map(|i| exp.shot(master_seed, i)).collect());
    Ok(Dataset { master_seed, config_digest: config_digest.to_string(), shots })
}

pub fn run_single_pair(
    exp: &SinglePairExperiment,
    master_seed: u64,
    n_shots: u64,
    config_digest: &str,
    workers: Option<usize>,
) -> Result<Dataset, CliError> {
    let shots = pool(workers)?.install(|| (0..n_shots).into_par_iter().map(|i| exp.shot(master_seed, i)).collect());
    Ok(Dataset { master_seed, config_digest: config_digest.to_string(), shots })
}
