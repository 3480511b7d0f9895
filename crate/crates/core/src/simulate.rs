//! Shot-level simulation pipeline: source, optional optics, detector.

use alloc::string::String;
use alloc::vec::Vec;

use crate::detection::{detect, Dataset, DetectionError, DetectorConfig, Shot};
use crate::interferometer::{transport, Optics};
use crate::quantum::{propagate, ModeSet, TwoParticleState};
use crate::seed::{shot_rng, Stream};
use crate::source::{sample_shot, EmissionEvent, SourceConfig, SourceError, Velocity3};

/// Everything needed to simulate one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub source: SourceConfig,
    pub detector: DetectorConfig,
    /// `None` simulates free expansion without Bragg pulses.
    pub optics: Option<Optics>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
}

impl Experiment {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.source.validate()?;
        self.detector.validate()?;
        Ok(())
    }

    /// Emitted (and transported) atoms of shot `index`, before detection.
    pub fn emit(&self, master_seed: u64, index: u64) -> EmissionEvent {
        let mut rng = shot_rng(master_seed, index, Stream::Source);
        let mut ev = sample_shot(&self.source, &mut rng);
        if let Some(optics) = &self.optics {
            let mut rng = shot_rng(master_seed, index, Stream::Optics);
            transport(&mut ev, &self.source, optics, &mut rng);
        }
        ev
    }

    /// Detected atoms of shot `index`.
    pub fn shot(&self, master_seed: u64, index: u64) -> Shot {
        let ev = self.emit(master_seed, index);
        let mut rng = shot_rng(master_seed, index, Stream::Detection);
        Shot { index, atoms: detect(&ev.atoms, &self.detector, &mut rng) }
    }

    /// Shots `0..n_shots`, computed sequentially.
    pub fn dataset(&self, master_seed: u64, n_shots: u64, config_digest: String) -> Dataset {
        Dataset {
            master_seed,
            config_digest,
            shots: (0..n_shots).map(|i| self.shot(master_seed, i)).collect(),
        }
    }
}

/// Source emitting exactly one pair per shot on the nominal velocities of a
/// mode set, with no jitter and no transverse spread.
#[derive(Debug, Clone, PartialEq)]
pub struct SinglePairExperiment {
    pub modes: ModeSet,
    pub state: TwoParticleState,
    pub optics: Optics,
    pub detector: DetectorConfig,
}

impl SinglePairExperiment {
    pub fn shot(&self, master_seed: u64, index: u64) -> Shot {
        use rand::Rng;
        let d = self.modes.detuning();
        let (ta, tb) = self.optics.interferometer.particle_transforms(d, -d);
        let pops = propagate(&self.state, &ta, &tb).populations();
        let mut rng = shot_rng(master_seed, index, Stream::Optics);
        let mut u = rng.random::<f64>() * pops.iter().sum::<f64>();
        let mut k = 3;
        for (i, p) in pops.iter().enumerate() {
            u -= p;
            if u < 0.0 {
                k = i;
                break;
            }
        }
        let [ap, am, bp, bm] = self.modes.port_velocities();
        let za = if k / 2 == 0 { ap } else { am };
        let zb = if k % 2 == 0 { bp } else { bm };
        let atoms: Vec<Velocity3> =
            alloc::vec![Velocity3::new(0.0, 0.0, za), Velocity3::new(0.0, 0.0, zb)];
        let mut rng = shot_rng(master_seed, index, Stream::Detection);
        Shot { index, atoms: detect(&atoms, &self.detector, &mut rng) }
    }

    pub fn dataset(&self, master_seed: u64, n_shots: u64) -> Dataset {
        Dataset {
            master_seed,
            config_digest: String::new(),
            shots: (0..n_shots).map(|i| self.shot(master_seed, i)).collect(),
        }
    }
}
