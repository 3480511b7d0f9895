//! Detector model, integration volumes and shot datasets.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::seed::SimRng;
use crate::source::Velocity3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectionError {
    #[error("invalid detector parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("invalid integration volume: {0}")]
    InvalidVolume(&'static str),
}

/// Detection efficiency and Gaussian velocity resolution (mm/s, per axis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub efficiency: f64,
    pub resolution_sigma: Velocity3,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { efficiency: 0.25, resolution_sigma: Velocity3::new(0.3, 0.3, 0.15) }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), DetectionError> {
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(DetectionError::InvalidParameter("efficiency must lie in (0, 1]"));
        }
        let r = self.resolution_sigma;
        if !(r.x >= 0.0 && r.y >= 0.0 && r.z >= 0.0 && r.is_finite()) {
            return Err(DetectionError::InvalidParameter("resolution must be non-negative"));
        }
        Ok(())
    }
}

/// Keeps each atom with probability `efficiency` and blurs the survivors.
pub fn detect(atoms: &[Velocity3], config: &DetectorConfig, rng: &mut SimRng) -> Vec<Velocity3> {
    let r = config.resolution_sigma;
    let mut out = Vec::with_capacity(atoms.len());
    for a in atoms {
        if config.efficiency < 1.0 && !rng.random_bool(config.efficiency) {
            continue;
        }
        let (gx, gy, gz): (f64, f64, f64) =
            (rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        out.push(Velocity3::new(a.x + r.x * gx, a.y + r.y * gy, a.z + r.z * gz));
    }
    out
}

/// Shape of an integration volume. Cylinders have their axis along z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumeShape {
    Rectangular { size: Velocity3 },
    Cylinder { diameter: f64, length: f64 },
}

/// A region of velocity space in which atoms are counted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationVolume {
    center: Velocity3,
    shape: VolumeShape,
}

impl IntegrationVolume {
    pub fn new(center: Velocity3, shape: VolumeShape) -> Result<Self, DetectionError> {
        if !center.is_finite() {
            return Err(DetectionError::InvalidVolume("centre must be finite"));
        }
        let ok = match shape {
            VolumeShape::Rectangular { size } => {
                size.x > 0.0 && size.y > 0.0 && size.z > 0.0 && size.is_finite()
            }
            VolumeShape::Cylinder { diameter, length } => {
                diameter > 0.0 && length > 0.0 && diameter.is_finite() && length.is_finite()
            }
        };
        if !ok {
            return Err(DetectionError::InvalidVolume("dimensions must be positive"));
        }
        Ok(IntegrationVolume { center, shape })
    }

    pub fn center(&self) -> Velocity3 {
        self.center
    }

    pub fn shape(&self) -> VolumeShape {
        self.shape
    }

    /// Same shape at another centre.
    pub fn moved_to(&self, center: Velocity3) -> Self {
        IntegrationVolume { center, shape: self.shape }
    }

    pub fn volume(&self) -> f64 {
        match self.shape {
            VolumeShape::Rectangular { size } => size.x * size.y * size.z,
            VolumeShape::Cylinder { diameter, length } => {
                0.25 * core::f64::consts::PI * diameter * diameter * length
            }
        }
    }

    /// Closed region test.
    pub fn contains(&self, v: &Velocity3) -> bool {
        let (dx, dy, dz) = (v.x - self.center.x, v.y - self.center.y, v.z - self.center.z);
        match self.shape {
            VolumeShape::Rectangular { size } => {
                2.0 * dx.abs() <= size.x && 2.0 * dy.abs() <= size.y && 2.0 * dz.abs() <= size.z
            }
            VolumeShape::Cylinder { diameter, length } => {
                4.0 * (dx * dx + dy * dy) <= diameter * diameter && 2.0 * dz.abs() <= length
            }
        }
    }

    /// Whether two volumes can share a point (conservative for cylinders).
    pub fn may_overlap(&self, other: &IntegrationVolume) -> bool {
        let (ax, ay, az) = self.half_extents();
        let (bx, by, bz) = other.half_extents();
        let (c, d) = (self.center, other.center);
        (c.x - d.x).abs() <= ax + bx && (c.y - d.y).abs() <= ay + by && (c.z - d.z).abs() <= az + bz
    }

    fn half_extents(&self) -> (f64, f64, f64) {
        match self.shape {
            VolumeShape::Rectangular { size } => (0.5 * size.x, 0.5 * size.y, 0.5 * size.z),
            VolumeShape::Cylinder { diameter, length } => (0.5 * diameter, 0.5 * diameter, 0.5 * length),
        }
    }
}

/// Figures whose integration volumes are tabulated for the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureVolume {
    Fig2,
    Fig3,
    Fig4,
    FigS1Left,
    FigS1Right,
    FigS3,
}

/// Integration volume used for `figure`, centred at `center`.
pub fn table_s1_volume(figure: FigureVolume, center: Velocity3) -> IntegrationVolume {
    let shape = match figure {
        FigureVolume::Fig2 => VolumeShape::Rectangular { size: Velocity3::new(9.2, 2.4, 0.9) },
        FigureVolume::Fig3 => VolumeShape::Cylinder { diameter: 32.2, length: 2.8 },
        FigureVolume::Fig4 => VolumeShape::Cylinder { diameter: 4.0, length: 2.0 },
        FigureVolume::FigS1Left => VolumeShape::Cylinder { diameter: 18.4, length: 1.8 },
        FigureVolume::FigS1Right => VolumeShape::Cylinder { diameter: 18.4, length: 0.9 },
        FigureVolume::FigS3 => VolumeShape::Cylinder { diameter: 4.0, length: 2.6 },
    };
    IntegrationVolume { center, shape }
}

/// Detected atoms of one shot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Shot {
    pub index: u64,
    pub atoms: Vec<Velocity3>,
}

impl Shot {
    /// Number of atoms inside `volume`.
    pub fn count(&self, volume: &IntegrationVolume) -> u32 {
        self.atoms.iter().filter(|a| volume.contains(a)).count() as u32
    }
}

/// Number of atoms of `shot` inside `volume`.
pub fn count(shot: &Shot, volume: &IntegrationVolume) -> u32 {
    shot.count(volume)
}

/// A sequence of detected shots with the seed and configuration digest that produced them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub master_seed: u64,
    pub config_digest: String,
    pub shots: Vec<Shot>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    /// Total number of detected atoms.
    pub fn atom_count(&self) -> usize {
        self.shots.iter().map(|s| s.atoms.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_boundary_is_closed() {
        let v = table_s1_volume(FigureVolume::Fig4, Velocity3::new(0.0, 0.0, 25.0));
        assert!(v.contains(&Velocity3::new(2.0, 0.0, 26.0)));
        assert!(!v.contains(&Velocity3::new(2.0, 0.01, 26.0)));
        assert!(!v.contains(&Velocity3::new(0.0, 0.0, 26.01)));
    }

    #[test]
    fn rectangle_contains() {
        let v = table_s1_volume(FigureVolume::Fig2, Velocity3::default());
        assert!(v.contains(&Velocity3::new(4.6, -1.2, 0.45)));
        assert!(!v.contains(&Velocity3::new(4.7, 0.0, 0.0)));
    }

    #[test]
    fn table_volumes() {
        let c = Velocity3::default();
        let v = table_s1_volume(FigureVolume::FigS1Right, c);
        assert_eq!(v.shape(), VolumeShape::Cylinder { diameter: 18.4, length: 0.9 });
        let v = table_s1_volume(FigureVolume::FigS3, c);
        assert_eq!(v.shape(), VolumeShape::Cylinder { diameter: 4.0, length: 2.6 });
    }

    #[test]
    fn invalid_volume_rejected() {
        let s = VolumeShape::Cylinder { diameter: -1.0, length: 1.0 };
        assert!(IntegrationVolume::new(Velocity3::default(), s).is_err());
    }

    #[test]
    fn perfect_detector_keeps_everything() {
        use crate::seed::{shot_rng, Stream};
        let atoms = [Velocity3::new(1.0, 2.0, 3.0); 10];
        let cfg = DetectorConfig { efficiency: 1.0, resolution_sigma: Velocity3::default() };
        let mut rng = shot_rng(1, 0, Stream::Detection);
        assert_eq!(detect(&atoms, &cfg, &mut rng), atoms.to_vec());
    }
}
