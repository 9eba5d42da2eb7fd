//! Physical constants (CODATA 2018, SI).

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Reference wavenumber in the dimensionless length unit used throughout the
/// crate: lengths are measured in units of the reference wavelength, so the
/// reference wavenumber is exactly 2π.
pub const K_REF: f64 = std::f64::consts::TAU;
