//! Estimators over shot datasets: count moments, g2, joint probabilities,
//! HOM dip, bootstrap errors and Gaussian fits.
//!
//! All moments are accumulated as exact integer sums, so every estimator is a
//! symmetric function of the shots.

mod bootstrap;
mod counts;
mod fit;
mod g2;
mod hom;
mod joint;

pub use bootstrap::{bootstrap, bootstrap_shots, bootstrap_sparse, EstimateWithError, MIN_RESAMPLES};
pub use counts::{cross_moment, factorial_moment, mean_count, CountTable};
pub use fit::{gaussian_fit, FitPoint, GaussianFit, MAX_ITERATIONS};
pub use g2::{
    g2_cross, g2_from_active, g2_from_rows, g2_map, g2_profile, long_axis_pairs, short_axis_pairs, G2Grid,
    G2Result,
};
pub use hom::{hom_from_rows, hom_probability_estimate, hom_probability_with_error, hom_scan, HomDip};
pub use joint::{
    fit_visibility, joint_from_rows, joint_probability_estimates, reference_sets, set_correlations,
    zero_level, ModeQuartet, SetCorrelation, ZeroLevel,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(&'static str),
    #[error("statistic undefined on {undefined} of {total} bootstrap resamples")]
    BootstrapUndefined { undefined: usize, total: usize },
    #[error("need at least {MIN_RESAMPLES} bootstrap resamples, got {0}")]
    TooFewResamples(usize),
    #[error("fit failed: {reason} after {iterations} iterations (chi2 {chi2})")]
    FitFailed { reason: &'static str, iterations: usize, chi2: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}
