//! Quantum-noise budget of weak-value-amplified interferometric position
//! measurements, computed in both the state-vector and the field-operator
//! pictures.
//!
//! Internally `c = 1`: lengths are stored as times and masses as rest energies.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod fiducial;
pub mod heisenberg;
pub mod noise;
pub mod numeric;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod schrodinger;
pub mod squeezing;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use params::{
    derive_coupling, measurement_intensity, weak_value, CouplingParams, Intensity, ParamSet, PulseParams, PulseSize,
    SelectionParams, WeakValue,
};
