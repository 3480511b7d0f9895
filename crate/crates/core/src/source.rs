//! Pair-emitting source: a discrete set of pair modes around +/-25 mm/s with
//! thermal (two-mode squeezed) pair statistics, plus an optional uncorrelated
//! background.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Geometric, Poisson, StandardNormal};
use thiserror::Error;

use crate::detection::{IntegrationVolume, VolumeShape};
use crate::math;
use crate::quantum::{partially_coherent_state, ModeSet, TwoParticleState};
use crate::seed::SimRng;

/// A velocity vector in mm/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Velocity3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Velocity3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Whether the two emission branches of a pair are coherent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coherence {
    #[default]
    Entangled,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SourceError {
    #[error("invalid source parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("no analytic expectation for this volume: {0}")]
    UnsupportedVolume(&'static str),
}

/// Source parameters. Velocities and widths in mm/s.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceConfig {
    /// Lab-frame velocity of the pair centre of mass (metadata only; samples are in the COM frame).
    pub com_velocity: Velocity3,
    /// Centre of the emission resonance along z.
    pub mode_center: f64,
    /// Width of the pair correlation along the anti-diagonal (v, -v).
    pub sigma_long: f64,
    /// Spread of the pair velocity sum v1 + v2.
    pub sigma_short: f64,
    /// Single-atom velocity spread within a mode.
    pub sigma_auto: f64,
    /// Transverse (x, y) velocity spread of pair atoms.
    pub transverse_sigma: f64,
    /// Mean pair number of the central mode.
    pub mean_pairs_per_mode: f64,
    pub n_modes: usize,
    pub coherence: Coherence,
    /// Keep probability of pairs whose upper mode lies below the resonance centre.
    pub asymmetry: f64,
    pub background: Background,
}

/// Uncorrelated atoms added to the pair emission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Background {
    None,
    /// Fills the single-atom longitudinal density up to `(1 + floor)` times
    /// its peak over the emission band `|v_z| in mode_center +/- 2.5 envelope_sigma`.
    ///
    /// The total single-atom density is then flat across the band, so the
    /// pair cross-correlation follows the pair-coincidence profile.
    FlatTop { floor: f64 },
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig {
            com_velocity: Velocity3::new(0.0, 0.0, 94.0),
            mode_center: 25.0,
            sigma_long: 9.0,
            sigma_short: 2.7,
            sigma_auto: 1.9,
            transverse_sigma: 1.0,
            mean_pairs_per_mode: DEFAULT_MEAN_PAIRS_PER_MODE,
            n_modes: 24,
            coherence: Coherence::Entangled,
            asymmetry: 1.0,
            background: Background::FlatTop { floor: 0.0 },
        }
    }
}

/// Central-mode pair number giving 0.2 atoms in a Fig. 4 volume at +25 mm/s
/// with the other defaults.
pub const DEFAULT_MEAN_PAIRS_PER_MODE: f64 = 0.2193;

impl SourceConfig {
    pub fn validate(&self) -> Result<(), SourceError> {
        use SourceError::InvalidParameter as E;
        if !self.com_velocity.is_finite() {
            return Err(E("com_velocity must be finite"));
        }
        if !(self.mode_center > 0.0 && self.mode_center.is_finite()) {
            return Err(E("mode_center must be positive"));
        }
        for (v, msg) in [
            (self.sigma_long, "sigma_long must be positive"),
            (self.sigma_short, "sigma_short must be positive"),
            (self.sigma_auto, "sigma_auto must be positive"),
            (self.transverse_sigma, "transverse_sigma must be positive"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(E(msg));
            }
        }
        if self.sigma_short > 2.0 * self.sigma_auto {
            return Err(E("sigma_short must not exceed 2 sigma_auto"));
        }
        if self.sigma_long * self.sigma_long + 0.25 * self.sigma_short * self.sigma_short
            <= self.sigma_auto * self.sigma_auto
        {
            return Err(E("sigma_long too small for sigma_auto"));
        }
        if !(self.mean_pairs_per_mode >= 0.0 && self.mean_pairs_per_mode.is_finite()) {
            return Err(E("mean_pairs_per_mode must be non-negative"));
        }
        if self.n_modes == 0 {
            return Err(E("n_modes must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.asymmetry) {
            return Err(E("asymmetry must lie in [0, 1]"));
        }
        if let Background::FlatTop { floor } = self.background {
            if !(floor >= 0.0 && floor.is_finite()) {
                return Err(E("background floor must be non-negative"));
            }
        }
        Ok(())
    }

    /// Gaussian width of the mode-occupation envelope, chosen so that the
    /// pair coincidence density along (v, -v) has width `sigma_long`.
    pub fn envelope_sigma(&self) -> f64 {
        math::sqrt(
            self.sigma_long * self.sigma_long - self.sigma_auto * self.sigma_auto
                + 0.25 * self.sigma_short * self.sigma_short,
        )
    }

    /// Correlation coefficient of the two partners' velocity jitters.
    pub fn jitter_correlation(&self) -> f64 {
        let r = self.sigma_short * self.sigma_short / (2.0 * self.sigma_auto * self.sigma_auto) - 1.0;
        r.clamp(-1.0, 1.0)
    }

    /// Pair-mode centres: a uniform grid over `mode_center +/- 2.5 envelope_sigma`,
    /// restricted to positive velocities.
    pub fn mode_centers(&self) -> Vec<f64> {
        let half = self.band_half_width();
        let n = self.n_modes;
        let step = 2.0 * half / n as f64;
        (0..n)
            .map(|k| self.mode_center - half + (k as f64 + 0.5) * step)
            .collect()
    }

    /// Half width of the emission band around `mode_center`.
    pub fn band_half_width(&self) -> f64 {
        (2.5 * self.envelope_sigma()).min(self.mode_center * 0.98)
    }

    /// Mode spacing of the pair-mode grid.
    pub fn mode_spacing(&self) -> f64 {
        2.0 * self.band_half_width() / self.n_modes as f64
    }

    /// Mean pair number of each mode after asymmetric thinning.
    pub fn mode_means(&self) -> Vec<f64> {
        let s = self.envelope_sigma();
        self.mode_centers()
            .iter()
            .map(|&c| {
                let d = (c - self.mode_center) / s;
                let keep = if c < self.mode_center { self.asymmetry } else { 1.0 };
                self.mean_pairs_per_mode * math::exp(-0.5 * d * d) * keep
            })
            .collect()
    }

    /// Expected number of pair atoms per shot.
    pub fn expected_pair_atoms(&self) -> f64 {
        2.0 * self.mode_means().iter().sum::<f64>()
    }

    /// Width of the single-side pair-atom density along z (continuum limit).
    fn single_sigma(&self) -> f64 {
        let (c, a) = (self.envelope_sigma(), self.sigma_auto);
        math::sqrt(c * c + a * a)
    }

    /// Pair-atom density per mm/s along z on one side, continuum limit of the mode grid.
    fn pair_density(&self, dz: f64) -> f64 {
        let ss = self.single_sigma();
        let peak = self.mean_pairs_per_mode / self.mode_spacing() * self.envelope_sigma() / ss;
        peak * math::exp(-0.5 * dz * dz / (ss * ss))
    }

    /// Background density per mm/s along z at distance `dz` from the band centre.
    fn background_density(&self, dz: f64) -> f64 {
        match self.background {
            Background::None => 0.0,
            Background::FlatTop { floor } => {
                if math::abs(dz) > self.band_half_width() {
                    return 0.0;
                }
                ((1.0 + floor) * self.pair_density(0.0) - self.pair_density(dz)).max(0.0)
            }
        }
    }

    /// Integral of the one-side background density over `dz in [lo, hi]`.
    fn background_integral(&self, lo: f64, hi: f64) -> f64 {
        let Background::FlatTop { floor } = self.background else {
            return 0.0;
        };
        let w = self.band_half_width();
        let (lo, hi) = (lo.max(-w), hi.min(w));
        if hi <= lo {
            return 0.0;
        }
        let ss = self.single_sigma();
        let flat = (1.0 + floor) * self.pair_density(0.0) * (hi - lo);
        let gauss = self.pair_density(0.0)
            * ss
            * math::sqrt(2.0 * core::f64::consts::PI)
            * (math::normal_cdf(hi / ss) - math::normal_cdf(lo / ss));
        flat - gauss
    }

    /// Expected number of background atoms per shot (both sides).
    pub fn expected_background_atoms(&self) -> f64 {
        let w = self.band_half_width();
        2.0 * self.background_integral(-w, w)
    }

    /// Expected number of emitted atoms (before detection) inside `volume`.
    ///
    /// Closed form for rectangular volumes and for cylinders on the z axis.
    pub fn expected_atoms_in(&self, volume: &IntegrationVolume) -> Result<f64, SourceError> {
        let c = volume.center();
        let t = self.transverse_sigma;
        let (z_lo, z_hi, transverse_prob) = match volume.shape() {
            VolumeShape::Rectangular { size } => {
                let px = interval_prob(c.x - 0.5 * size.x, c.x + 0.5 * size.x, 0.0, t);
                let py = interval_prob(c.y - 0.5 * size.y, c.y + 0.5 * size.y, 0.0, t);
                (c.z - 0.5 * size.z, c.z + 0.5 * size.z, px * py)
            }
            VolumeShape::Cylinder { diameter, length } => {
                if c.x != 0.0 || c.y != 0.0 {
                    return Err(SourceError::UnsupportedVolume("cylinder off the z axis"));
                }
                let r = 0.5 * diameter;
                let p_r = 1.0 - math::exp(-0.5 * r * r / (t * t));
                (c.z - 0.5 * length, c.z + 0.5 * length, p_r)
            }
        };
        let sa = self.sigma_auto;
        let mut pairs = 0.0;
        for (&ck, &mu) in self.mode_centers().iter().zip(self.mode_means().iter()) {
            pairs += mu * (interval_prob(z_lo, z_hi, ck, sa) + interval_prob(z_lo, z_hi, -ck, sa));
        }
        let m = self.mode_center;
        let bg = self.background_integral(z_lo - m, z_hi - m)
            + self.background_integral(-z_hi - m, -z_lo - m);
        Ok((pairs + bg) * transverse_prob)
    }
}

fn interval_prob(lo: f64, hi: f64, mean: f64, sigma: f64) -> f64 {
    math::normal_cdf((hi - mean) / sigma) - math::normal_cdf((lo - mean) / sigma)
}

/// Links the two atoms of one emitted pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTag {
    /// Index into [`SourceConfig::mode_centers`].
    pub mode: u32,
    /// Mode centre velocity c (mm/s); the atoms sit near +c and -c.
    pub center: f64,
    /// Atom emitted near +c.
    pub plus: u32,
    /// Atom emitted near -c.
    pub minus: u32,
}

/// Atoms emitted in one shot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmissionEvent {
    pub atoms: Vec<Velocity3>,
    pub pairs: Vec<PairTag>,
}

impl EmissionEvent {
    /// Number of atoms not belonging to any tagged pair.
    pub fn unpaired_count(&self) -> usize {
        self.atoms.len() - 2 * self.pairs.len()
    }
}

/// Draws one shot of emitted atoms.
pub fn sample_shot(config: &SourceConfig, rng: &mut SimRng) -> EmissionEvent {
    let centers = config.mode_centers();
    let means = config.mode_means();
    let sa = config.sigma_auto;
    let rho = config.jitter_correlation();
    let rho_c = math::sqrt((1.0 - rho * rho).max(0.0));
    let st = config.transverse_sigma;
    let mut ev = EmissionEvent::default();
    for (k, (&c, &mu)) in centers.iter().zip(means.iter()).enumerate() {
        let n = thermal_count(mu, rng);
        for _ in 0..n {
            let z1: f64 = rng.sample(StandardNormal);
            let z2: f64 = rng.sample(StandardNormal);
            let j1 = sa * z1;
            let j2 = sa * (rho * z1 + rho_c * z2);
            let plus = ev.atoms.len() as u32;
            ev.atoms.push(transverse_atom(c + j1, st, rng));
            ev.atoms.push(transverse_atom(-c + j2, st, rng));
            ev.pairs.push(PairTag { mode: k as u32, center: c, plus, minus: plus + 1 });
        }
    }
    let nb = config.expected_background_atoms();
    if nb > 0.0 {
        let n = Poisson::new(nb).map(|d| d.sample(rng) as u64).unwrap_or(0);
        let w = config.band_half_width();
        let cap = config.background_density(w);
        for _ in 0..n {
            // rejection sampling of |v_z| - mode_center from the background density
            let dz = loop {
                let dz = rng.random_range(-w..w);
                if rng.random::<f64>() * cap <= config.background_density(dz) {
                    break dz;
                }
            };
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            ev.atoms.push(transverse_atom(side * (config.mode_center + dz), st, rng));
        }
    }
    ev
}

fn thermal_count(mean: f64, rng: &mut SimRng) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Geometric::new(1.0 / (1.0 + mean)).map(|g| g.sample(rng)).unwrap_or(0)
}

fn transverse_atom(z: f64, sigma: f64, rng: &mut SimRng) -> Velocity3 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Velocity3::new(sigma * x, sigma * y, z)
}

/// Two-particle state of a pair in `modes`, with branch weights `(1, sqrt(asymmetry))`.
///
/// The second branch `|-p', p'>` is the one whose pair mode lies below the resonance.
pub fn two_particle_state_for(config: &SourceConfig, modes: &ModeSet) -> TwoParticleState {
    debug_assert!(modes.v_p() >= modes.v_p_prime());
    pair_state(config, 1.0)
}

/// Pair state with the branch coherence scaled by `overlap` in `[0, 1]`.
pub fn pair_state(config: &SourceConfig, overlap: f64) -> TwoParticleState {
    let w2 = math::sqrt(config.asymmetry);
    let lam = match config.coherence {
        Coherence::Entangled => overlap,
        Coherence::Mixed => 0.0,
    };
    partially_coherent_state(1.0, w2, lam)
}
