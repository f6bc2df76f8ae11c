//! Physical constants (CODATA 2018) and small frequency helpers.
//!
//! Everything in this crate is strict SI: lengths in m, areas in m², powers
//! in W, angular frequencies in rad/s.

use std::f64::consts::PI;

/// Reduced Planck constant ħ \[J·s\].
pub const HBAR: f64 = 1.054_571_817e-34;

/// Vacuum permittivity ε₀ \[F/m\].
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Vacuum permeability μ₀ \[N/A²\].
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;

/// Speed of light in vacuum c \[m/s\] (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Angular frequency ω = 2πc/λ \[rad/s\] of light at vacuum wavelength `lambda` \[m\].
pub fn omega_from_wavelength(lambda: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda
}

/// Vacuum wavelength λ = 2πc/ω \[m\] at angular frequency `omega` \[rad/s\].
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}
