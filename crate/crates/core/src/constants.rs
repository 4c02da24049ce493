//! Physical constants (SI).

/// Boltzmann constant [J/K] (exact).
pub const KB: f64 = 1.380_649e-23;

/// Reduced Planck constant [J·s].
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permeability [T·m/A].
pub const MU0: f64 = 1.256_637_062_12e-6;

/// Bohr magneton [J/T].
pub const MU_B: f64 = 9.274_010_078_3e-24;

/// Mass of 87Rb [kg].
pub const MASS_RB87: f64 = 1.443_160_6e-25;
