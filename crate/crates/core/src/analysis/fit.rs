use alloc::vec::Vec;

use crate::linalg::solve_dense;
use crate::math;

use super::AnalysisError;

/// Iteration cap of the damped least-squares loop.
pub const MAX_ITERATIONS: usize = 200;

/// A data point with its one-sigma error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    pub x: f64,
    pub y: f64,
    pub err: f64,
}

/// Result of `y = offset + amplitude exp(-(x - center)^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub center: f64,
    pub sigma: f64,
    pub offset: f64,
    /// Covariance in the order (amplitude, center, sigma, offset); offset
    /// row and column are zero when it was held fixed.
    pub covariance: [[f64; 4]; 4],
    pub chi2: f64,
    pub iterations: usize,
}

impl GaussianFit {
    /// One-sigma errors in the order (amplitude, center, sigma, offset).
    pub fn errors(&self) -> [f64; 4] {
        core::array::from_fn(|i| math::sqrt(self.covariance[i][i].max(0.0)))
    }

    pub fn eval(&self, x: f64) -> f64 {
        model(&[self.amplitude, self.center, self.sigma, self.offset], x)
    }
}

fn model(p: &[f64; 4], x: f64) -> f64 {
    let d = (x - p[1]) / p[2];
    p[3] + p[0] * math::exp(-0.5 * d * d)
}

fn jacobian_row(p: &[f64; 4], x: f64) -> [f64; 4] {
    let s = p[2];
    let d = x - p[1];
    let g = math::exp(-0.5 * d * d / (s * s));
    [g, p[0] * g * d / (s * s), p[0] * g * d * d / (s * s * s), 1.0]
}

fn chi2(points: &[FitPoint], p: &[f64; 4]) -> f64 {
    points
        .iter()
        .map(|q| {
            let r = (q.y - model(p, q.x)) / q.err;
            r * r
        })
        .sum()
}

fn initial_guess(points: &[FitPoint], fixed_offset: Option<f64>) -> [f64; 4] {
    let mut sorted: Vec<FitPoint> = points.to_vec();
    sorted.sort_by(|a, b| a.x.total_cmp(&b.x));
    let o = fixed_offset
        .unwrap_or(0.5 * (sorted[0].y + sorted[sorted.len() - 1].y));
    let k = (0..sorted.len())
        .max_by(|&a, &b| math::abs(sorted[a].y - o).total_cmp(&math::abs(sorted[b].y - o)))
        .unwrap_or(0);
    let a = sorted[k].y - o;
    let above: Vec<f64> = sorted
        .iter()
        .filter(|q| math::abs(q.y - o) >= 0.5 * math::abs(a))
        .map(|q| q.x)
        .collect();
    let span = sorted[sorted.len() - 1].x - sorted[0].x;
    let fwhm = above.last().copied().unwrap_or(0.0) - above.first().copied().unwrap_or(0.0);
    let min_step = sorted.windows(2).map(|w| w[1].x - w[0].x).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    let mut s = if fwhm > 0.0 { fwhm / 2.355 } else { span / 6.0 };
    if min_step.is_finite() {
        s = s.max(0.5 * min_step);
    }
    [a, sorted[k].x, s, o]
}

/// Weighted damped least-squares Gaussian fit (Levenberg-Marquardt).
///
/// With `fixed_offset` the offset is held at that value.
pub fn gaussian_fit(points: &[FitPoint], fixed_offset: Option<f64>) -> Result<GaussianFit, AnalysisError> {
    if points.len() < 4 {
        return Err(AnalysisError::InvalidInput("gaussian_fit needs at least 4 points"));
    }
    if points.iter().any(|q| !(q.err > 0.0) || !q.x.is_finite() || !q.y.is_finite() || !q.err.is_finite()) {
        return Err(AnalysisError::InvalidInput("points need finite values and positive errors"));
    }
    let free: &[usize] = if fixed_offset.is_some() { &[0, 1, 2] } else { &[0, 1, 2, 3] };
    let n = free.len();
    let mut p = initial_guess(points, fixed_offset);
    let mut c2 = chi2(points, &p);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = normal_equations(points, &p, free);
        let mut improved = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[i * n + i] += lambda * jtj[i * n + i].max(1e-300);
            }
            let mut step = jtr.clone();
            if solve_dense(&mut a, &mut step, n).is_none() {
                lambda *= 10.0;
                continue;
            }
            let mut trial = p;
            for (k, &i) in free.iter().enumerate() {
                trial[i] += step[k];
            }
            trial[2] = math::abs(trial[2]);
            let t2 = chi2(points, &trial);
            if t2.is_finite() && t2 <= c2 {
                let small_step = free.iter().enumerate().all(|(k, &i)| {
                    math::abs(step[k]) <= 1e-12 * (math::abs(p[i]) + 1e-12)
                });
                let small_gain = c2 - t2 <= 1e-14 * c2 + 1e-300;
                p = trial;
                c2 = t2;
                lambda = (lambda * 0.1).max(1e-15);
                improved = true;
                if small_step || small_gain {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // no downhill step at any damping: at a numerical minimum
            converged = true;
        }
        if converged {
            break;
        }
    }
    if !converged {
        return Err(AnalysisError::FitFailed { reason: "iteration limit reached", iterations, chi2: c2 });
    }
    if !(p[2] > 0.0) || p.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::FitFailed { reason: "degenerate parameters", iterations, chi2: c2 });
    }
    let (jtj, _) = normal_equations(points, &p, free);
    let mut covariance = [[0.0; 4]; 4];
    for (col, &ic) in free.iter().enumerate() {
        let mut a = jtj.clone();
        let mut e = alloc::vec![0.0; n];
        e[col] = 1.0;
        if solve_dense(&mut a, &mut e, n).is_none() {
            return Err(AnalysisError::FitFailed { reason: "singular covariance", iterations, chi2: c2 });
        }
        for (row, &ir) in free.iter().enumerate() {
            covariance[ir][ic] = e[row];
        }
    }
    Ok(GaussianFit {
        amplitude: p[0],
        center: p[1],
        sigma: p[2],
        offset: p[3],
        covariance,
        chi2: c2,
        iterations,
    })
}

fn normal_equations(points: &[FitPoint], p: &[f64; 4], free: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let n = free.len();
    let mut jtj = alloc::vec![0.0; n * n];
    let mut jtr = alloc::vec![0.0; n];
    for q in points {
        let w = 1.0 / (q.err * q.err);
        let row = jacobian_row(p, q.x);
        let r = q.y - model(p, q.x);
        for (a, &ia) in free.iter().enumerate() {
            jtr[a] += w * row[ia] * r;
            for (b, &ib) in free.iter().enumerate() {
                jtj[a * n + b] += w * row[ia] * row[ib];
            }
        }
    }
    (jtj, jtr)
}
