//! SI boundary layer.
//!
//! Everything past this module works in `c = 1` units: lengths are stored as
//! light travel times (seconds) and masses as rest energies (joules). The
//! helpers here are the only places where `c` appears.

/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant (J s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Metres to light travel time (s).
#[inline]
pub fn length_to_time(metres: f64) -> f64 {
    metres / C
}

/// Light travel time (s) back to metres.
#[inline]
pub fn time_to_length(seconds: f64) -> f64 {
    seconds * C
}

/// Rest energy `m c^2` (J) of a mass in kilograms.
#[inline]
pub fn rest_energy(mass_kg: f64) -> f64 {
    mass_kg * C * C
}

pub const GRAM: f64 = 1e-3;
