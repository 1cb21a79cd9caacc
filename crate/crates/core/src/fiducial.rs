//! Reference parameter sets used by the CLI, the verification suite and the tests.

use crate::params::{PulseParams, PulseSize, SelectionParams};
use crate::units::GRAM;

pub const OMEGA0: f64 = 1.8e15;
pub const SIGMA_TILDE: f64 = 1.0;
pub const PULSE_ENERGY: f64 = 10.0;
pub const INTERVAL: f64 = 1e-3;
pub const MASS: f64 = 1.0 * GRAM;

/// Post-selection offset shared by the figures and the noise budget.
pub const THETA: f64 = 1e-3;
/// Displacement phase of the photon-distribution figures.
pub const FIGURE_PHI: f64 = 1e-4;
/// Displacement used for noise budgets: close to the SQL scale, so that
/// `phi / theta` is negligible and the small-phi expansion holds.
pub const NOISE_ELL_M: f64 = 1e-17;

/// 1 g mirror, 1.8e15 rad/s carrier, 1 ms interval, 10 J pulses, sigma_tilde = 1.
pub fn si_pulse() -> PulseParams {
    PulseParams::with_sigma_tilde(
        OMEGA0,
        SIGMA_TILDE,
        PulseSize::Energy(PULSE_ENERGY),
        INTERVAL,
        MASS,
    )
    .expect("fiducial pulse is valid")
}

pub fn noise_selection() -> SelectionParams {
    SelectionParams::new(THETA, NOISE_ELL_M).expect("fiducial selection is valid")
}

pub fn figure_selection() -> SelectionParams {
    SelectionParams::from_phase(THETA, FIGURE_PHI, &si_pulse()).expect("fiducial selection is valid")
}
