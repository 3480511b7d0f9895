//! Simulation core for a two-particle, four-mode Bragg atom interferometer
//! fed by a source of correlated metastable-helium atom pairs.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command-line front end live in the `fourmode` crate.
//!
//! Units: velocities are in mm/s in the centre-of-mass frame, angular
//! frequencies in rad/s, durations in seconds and phases in radians.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod constants;
pub mod detection;
pub mod interferometer;
pub mod linalg;
pub(crate) mod math;
pub mod quantum;
pub mod seed;
pub mod simulate;
pub mod source;

pub use num_complex::Complex64;
