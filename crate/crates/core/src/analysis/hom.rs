use crate::detection::{Dataset, IntegrationVolume};

use super::{bootstrap_sparse, gaussian_fit, AnalysisError, CountTable, EstimateWithError, FitPoint, GaussianFit};

/// `P(C+, C-) = 2 <n+ n-> / Lambda`, `Lambda = <n+(n+ - 1)> + <n-(n- - 1)> + 2 <n+ n->`.
pub fn hom_from_rows(rows: &[&[u32]], i_plus: usize, i_minus: usize) -> Option<f64> {
    let (mut cross, mut auto) = (0u64, 0u64);
    for r in rows {
        let (a, b) = (r[i_plus] as u64, r[i_minus] as u64);
        cross += a * b;
        auto += a * a.saturating_sub(1) + b * b.saturating_sub(1);
    }
    let lambda = auto + 2 * cross;
    if lambda == 0 { None } else { Some(2.0 * cross as f64 / lambda as f64) }
}

/// Probability that the two atoms leave in different ports of the degenerate splitter.
pub fn hom_probability_estimate(
    dataset: &Dataset,
    vol_plus: &IntegrationVolume,
    vol_minus: &IntegrationVolume,
) -> Result<f64, AnalysisError> {
    let table = CountTable::new(dataset, &[*vol_plus, *vol_minus]);
    hom_from_rows(&table.rows(), 0, 1)
        .ok_or(AnalysisError::InsufficientStatistics("no pairs of atoms in the HOM volumes"))
}

/// [`hom_probability_estimate`] with a bootstrap error over shots.
pub fn hom_probability_with_error(
    dataset: &Dataset,
    vol_plus: &IntegrationVolume,
    vol_minus: &IntegrationVolume,
    n_resamples: usize,
    seed: u64,
) -> Result<EstimateWithError, AnalysisError> {
    let table = CountTable::new(dataset, &[*vol_plus, *vol_minus]);
    let active = table.active_rows(&[0, 1]);
    bootstrap_sparse(&active, table.n_shots(), n_resamples, seed, |s, _| hom_from_rows(s, 0, 1))
}

/// Gaussian fit to a scan of `P(C+, C-)` versus splitter time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomDip {
    pub fit: GaussianFit,
    /// Fitted dip centre, the closing time of the interferometer.
    pub center: f64,
    /// `-amplitude / offset`.
    pub visibility: f64,
}

/// Fits a dip to `(time, P(C+, C-))` points; needs at least 5 points.
pub fn hom_scan(points: &[(f64, EstimateWithError)]) -> Result<HomDip, AnalysisError> {
    if points.len() < 5 {
        return Err(AnalysisError::InvalidInput("HOM scan needs at least 5 time points"));
    }
    let floor = points.iter().map(|(_, e)| e.sigma).filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 1e-3 };
    let fp: alloc::vec::Vec<FitPoint> = points
        .iter()
        .map(|(t, e)| FitPoint { x: *t, y: e.value, err: e.sigma.max(floor) })
        .collect();
    let fit = gaussian_fit(&fp, None)?;
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (t, _)| (a.min(*t), b.max(*t)));
    if fit.center < lo || fit.center > hi {
        return Err(AnalysisError::FitFailed {
            reason: "dip centre outside the scanned range",
            iterations: fit.iterations,
            chi2: fit.chi2,
        });
    }
    let visibility = if fit.offset != 0.0 { -fit.amplitude / fit.offset } else { 0.0 };
    Ok(HomDip { fit, center: fit.center, visibility })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn p(rows: &[[u32; 2]]) -> Option<f64> {
        let refs: Vec<&[u32]> = rows.iter().map(|r| &r[..]).collect();
        hom_from_rows(&refs, 0, 1)
    }

    #[test]
    fn hand_examples() {
        assert_eq!(p(&[[1, 1], [1, 1]]), Some(1.0));
        assert_eq!(p(&[[2, 0], [0, 2]]), Some(0.0));
        assert_eq!(p(&[[0, 0]]), None);
    }

    #[test]
    fn symmetric_dip_centre() {
        let pts: Vec<(f64, EstimateWithError)> = (0..13)
            .map(|i| {
                let t = 1650.0 + 50.0 * i as f64;
                let d = (t - 1950.0) / 120.0;
                let v = 0.5 - 0.4 * libm::exp(-0.5 * d * d);
                (t, EstimateWithError { value: v, sigma: 0.02, n_resamples: 100 })
            })
            .collect();
        let dip = hom_scan(&pts).unwrap();
        assert!((dip.center - 1950.0).abs() < 1e-6);
        assert!((dip.visibility - 0.8).abs() < 1e-6);
    }
}
