//! CODATA 2018 physical constants and the Hz <-> rad/s boundary conversion.
//!
//! Every rate inside the toolkit is an angular frequency in rad/s. Files,
//! configs and the CLI speak ordinary frequency in Hz; conversion happens
//! only at those boundaries through [`hz_to_angular`] and [`angular_to_hz`].

use std::f64::consts::TAU;

/// Fixed SI constants used by the coupling and noise models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum, m/s (exact).
    pub c: f64,
    /// Reduced Planck constant, J·s (exact).
    pub hbar: f64,
    /// Boltzmann constant, J/K (exact).
    pub k_b: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    c: 299_792_458.0,
    hbar: 1.054_571_817e-34,
    k_b: 1.380_649e-23,
    eps0: 8.854_187_812_8e-12,
};

pub const C: f64 = CONSTANTS.c;
pub const HBAR: f64 = CONSTANTS.hbar;
pub const K_B: f64 = CONSTANTS.k_b;
pub const EPS0: f64 = CONSTANTS.eps0;

/// Room temperature used by the noise fixtures, K.
pub const ROOM_TEMPERATURE: f64 = 300.0;

#[inline]
pub fn hz_to_angular(f_hz: f64) -> f64 {
    f_hz * TAU
}

#[inline]
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}

/// Vacuum wavelength (m) to optical frequency (Hz).
#[inline]
pub fn wavelength_to_hz(wavelength: f64) -> f64 {
    C / wavelength
}
