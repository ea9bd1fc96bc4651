//! SI conversions. Internally every frequency, rate, energy and temperature
//! is an angular frequency in rad/s (`ħ = k_B = 1`).

use std::f64::consts::TAU;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// `k_B/ħ` in rad·s⁻¹·K⁻¹.
pub const KELVIN_TO_RAD_PER_S: f64 = K_B / HBAR;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
pub fn hz(f: f64) -> f64 {
    TAU * f
}

pub fn to_hz(omega: f64) -> f64 {
    omega / TAU
}

/// Temperature in kelvin to its thermal angular frequency `k_B T/ħ`.
pub fn kelvin(t: f64) -> f64 {
    t * KELVIN_TO_RAD_PER_S
}

pub fn to_kelvin(t: f64) -> f64 {
    t / KELVIN_TO_RAD_PER_S
}

/// A power in natural units (energy × rate, rad²/s²) to watts.
pub fn to_watts(power: f64) -> f64 {
    power * HBAR
}

/// An energy in natural units (rad/s) to joules.
pub fn to_joules(energy: f64) -> f64 {
    energy * HBAR
}
