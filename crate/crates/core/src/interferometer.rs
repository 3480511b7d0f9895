//! Monte Carlo transport of emitted atoms through the Bragg interferometer.
//!
//! Each tagged pair is assigned its roles `A` (modes `{p, -p'}`) and `B`
//! (modes `{p', -p}`) with `p = max(c, 50 - c)`. The pair state is propagated
//! with per-atom detunings taken from the atoms' own velocities, and one pair
//! of output ports is drawn from the resulting joint probabilities. Atoms that
//! are not part of a tagged pair undergo single-particle Bragg transfer.

use rand::Rng;

use crate::constants::{BRAGG_VELOCITY_SUM, DETUNING_PER_MM_S, HBAR_J_S, HELIUM4_MASS_KG, MM_PER_S, MODE_CENTER};
use crate::math;
use crate::quantum::{propagate, Interferometer};
use crate::seed::SimRng;
use crate::source::{pair_state, EmissionEvent, SourceConfig};

/// Interferometer plus the temporal overlap of the recombined wavepackets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optics {
    pub interferometer: Interferometer,
    /// Coherence between the two pair branches at the splitter, in `[0, 1]`.
    pub overlap: f64,
}

impl Optics {
    pub fn new(interferometer: Interferometer) -> Self {
        Optics { interferometer, overlap: 1.0 }
    }
}

/// Branch coherence for a splitter applied `delay` seconds away from the
/// closing time.
///
/// Squared overlap of two Gaussian packets with momentum spread
/// `m sigma_auto`, displaced by `50 mm/s * delay`.
pub fn hom_overlap(delay: f64, sigma_auto: f64) -> f64 {
    let dz = BRAGG_VELOCITY_SUM * MM_PER_S * delay;
    let sp = HELIUM4_MASS_KG * sigma_auto * MM_PER_S;
    let x = dz * sp / HBAR_J_S;
    math::exp(-x * x)
}

/// Detuning of a two-mode space whose upper mode moves at `v_upper` mm/s.
#[inline]
pub fn detuning_of_upper(v_upper: f64) -> f64 {
    DETUNING_PER_MM_S * (v_upper - MODE_CENTER)
}

/// Moves every atom of `event` through the interferometer in place.
pub fn transport(event: &mut EmissionEvent, source: &SourceConfig, optics: &Optics, rng: &mut SimRng) {
    let interf = &optics.interferometer;
    let phases = interf.phases();
    let rho = pair_state(source, optics.overlap);
    let mut paired = alloc::vec![false; event.atoms.len()];
    for tag in &event.pairs {
        let (ip, im) = (tag.plus as usize, tag.minus as usize);
        paired[ip] = true;
        paired[im] = true;
        let c = tag.center;
        let j_plus = event.atoms[ip].z - c;
        let j_minus = event.atoms[im].z + c;
        let p = c.max(BRAGG_VELOCITY_SUM - c);
        let pp = BRAGG_VELOCITY_SUM - p;
        // A holds the atom on p (or -p'), B the atom on -p (or p').
        let (ia, ja, ib, jb) = if c >= MODE_CENTER {
            (ip, j_plus, im, j_minus)
        } else {
            (im, j_minus, ip, j_plus)
        };
        let delta_a = detuning_of_upper(p + ja);
        let delta_b = detuning_of_upper(pp + jb);
        let (ta, tb) = interf.particle_transforms(delta_a, delta_b);
        let pops = propagate(&rho, &ta, &tb).populations();
        let k = sample_index(&pops, rng);
        let (a_port, b_port) = (k / 2, k % 2);
        event.atoms[ia].z = if a_port == 0 { p } else { -pp } + ja;
        event.atoms[ib].z = if b_port == 0 { pp } else { -p } + jb;
    }
    for (i, atom) in event.atoms.iter_mut().enumerate() {
        if paired[i] {
            continue;
        }
        let z = atom.z;
        let (upper, port) = if z > 0.0 { (z, 0) } else { (z + BRAGG_VELOCITY_SUM, 1) };
        let phase = if upper >= MODE_CENTER { phases.splitter_a } else { phases.splitter_b };
        let t = interf.transform(detuning_of_upper(upper), phase);
        if rng.random_bool(t.transition_probability(1 - port, port).clamp(0.0, 1.0)) {
            atom.z = if port == 0 { z - BRAGG_VELOCITY_SUM } else { z + BRAGG_VELOCITY_SUM };
        }
    }
}

fn sample_index(p: &[f64; 4], rng: &mut SimRng) -> usize {
    let total: f64 = p.iter().map(|x| x.max(0.0)).sum();
    let mut u = rng.random::<f64>() * total;
    for (i, x) in p.iter().enumerate() {
        u -= x.max(0.0);
        if u < 0.0 {
            return i;
        }
    }
    3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_is_one_at_closing_time_and_decays() {
        assert_eq!(hom_overlap(0.0, 1.9), 1.0);
        let a = hom_overlap(100e-6, 1.9);
        let b = hom_overlap(200e-6, 1.9);
        assert!(a < 1.0 && b < a);
        assert_eq!(hom_overlap(-100e-6, 1.9), a);
    }

    #[test]
    fn sample_index_follows_weights() {
        use crate::seed::{shot_rng, Stream};
        let mut rng = shot_rng(3, 0, Stream::Optics);
        let p = [0.0, 0.25, 0.75, 0.0];
        let mut hits = [0usize; 4];
        for _ in 0..20000 {
            hits[sample_index(&p, &mut rng)] += 1;
        }
        assert_eq!(hits[0] + hits[3], 0);
        assert!((hits[2] as f64 / 20000.0 - 0.75).abs() < 0.015);
    }
}
