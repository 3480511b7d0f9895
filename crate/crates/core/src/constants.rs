//! Physical constants and fixed experiment geometry.

/// Mass of a helium-4 atom in kg.
pub const HELIUM4_MASS_KG: f64 = 6.646_473_1e-27;

/// Reduced Planck constant in J s.
pub const HBAR_J_S: f64 = 1.054_571_817e-34;

/// Velocity sum fixed by the Bragg lattice: v_p + v_p' (mm/s).
pub const BRAGG_VELOCITY_SUM: f64 = 50.0;

/// Centre of the emission resonance (mm/s).
pub const MODE_CENTER: f64 = 25.0;

/// Conversion from mm/s to m/s.
pub const MM_PER_S: f64 = 1.0e-3;

/// Detuning slope: delta = DETUNING_PER_MM_S * (v_upper - 25) in rad/s.
///
/// Follows from m (v_p^2 - v_p'^2) / (2 hbar) with v_p + v_p' = 50 mm/s.
pub const DETUNING_PER_MM_S: f64 =
    HELIUM4_MASS_KG * BRAGG_VELOCITY_SUM * MM_PER_S * MM_PER_S / HBAR_J_S;
