//! Shot noise, radiation-pressure noise and the standard quantum limit of the
//! post-selected frequency-shift readout.
//!
//! All variances are of the normalized shift `Omega~` and are dimensionless.
//! The budget keeps the leading order in `phi`; the exact conditional second
//! moment is evaluated alongside it and the relative gap between the two is
//! reported as `expansion_residual`. A gap above [`WEAK_REGIME_LIMIT`] means
//! the displacement phase is too large for the expansion and is an error.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{output_fraction, second_moment as exact_second_moment, PhotonCount};
use crate::params::{
    derive_coupling, measurement_intensity, weak_value, ParamSet, PulseParams, SelectionParams,
};
use crate::units::{self, HBAR};

/// Largest tolerated gap between the leading-order and the exact budget.
pub const WEAK_REGIME_LIMIT: f64 = 1e-3;
/// Displacement phase above which a warning is logged.
pub const WEAK_PHASE_WARNING: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub shot: f64,
    pub radiation_pressure: f64,
    pub total: f64,
    pub sql_reference: f64,
    pub intensity_i: f64,
    pub eta: f64,
    /// `<xi_r^2>` in s^2, including any squeezing of the earlier pulse.
    pub xi_r_variance: f64,
    pub photon_count: PhotonCount,
    pub expansion_residual: f64,
}

impl NoiseBudget {
    /// `total / sql_reference`.
    pub fn sql_ratio(&self) -> f64 {
        self.total / self.sql_reference
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrReport {
    pub signal: f64,
    pub noise: f64,
    pub snr: f64,
    /// Minimum detectable displacement (m).
    pub ell_min: f64,
    /// SQL displacement (m).
    pub ell_sql: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Displacements {
    pub ell_min: f64,
    pub ell_sql: f64,
}

/// `<xi_r^2> = (2 hbar omega0 T / (m c^2))^2 (1 + sigma~^2) N0`, in s^2.
pub fn radiation_pressure_variance(pulse: &PulseParams) -> f64 {
    let st = pulse.sigma_tilde();
    let kick = 2.0 * pulse.recoil_time();
    kick * kick * (1.0 + st * st) * pulse.photon_number()
}

/// `<(dOmega~)^2>_SQL = 2 sigma~^2 eta / sin^2(theta/2)`.
pub fn sql_variance(pulse: &PulseParams, theta: f64) -> f64 {
    let st = pulse.sigma_tilde();
    let eta = measurement_intensity(pulse, theta).eta;
    2.0 * st * st * eta / (0.5 * theta).sin().powi(2)
}

/// Options for [`total_variance_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetOptions {
    pub photon_count: PhotonCount,
}

impl Default for BudgetOptions {
    fn default() -> Self {
        Self {
            photon_count: PhotonCount::Approx,
        }
    }
}

/// Coherent-vacuum budget with the small-phi photon number `N0 sin^2(theta/2)`.
pub fn total_variance(pulse: &PulseParams, sel: &SelectionParams) -> Result<NoiseBudget> {
    total_variance_with(pulse, sel, BudgetOptions::default())
}

pub fn total_variance_with(
    pulse: &PulseParams,
    sel: &SelectionParams,
    opts: BudgetOptions,
) -> Result<NoiseBudget> {
    budget(pulse, sel, opts.photon_count, 1.0, 1.0)
}

/// Budget with the shot term scaled by `shot_factor` and the radiation
/// pressure term by `rp_factor` (the squeezed-vacuum modifications).
pub(crate) fn budget(
    pulse: &PulseParams,
    sel: &SelectionParams,
    count: PhotonCount,
    shot_factor: f64,
    rp_factor: f64,
) -> Result<NoiseBudget> {
    let theta = sel.theta();
    weak_value(theta)?;
    let c = derive_coupling(sel, pulse);
    if c.phi.abs() >= WEAK_PHASE_WARNING {
        log::warn!(
            "phi = {:.3e} rad is outside the weak regime (|phi| < {WEAK_PHASE_WARNING:e})",
            c.phi
        );
    }

    let st2 = pulse.sigma_tilde().powi(2);
    let n0 = pulse.photon_number();
    let intensity = measurement_intensity(pulse, theta);
    let sql = 2.0 * st2 * intensity.eta / (0.5 * theta).sin().powi(2);
    let xi2 = radiation_pressure_variance(pulse);
    let sin2 = theta.sin().powi(2);
    // (P0 / hbar)^2 = (N0 omega0)^2
    let rp_scale = (n0 * pulse.omega0() * st2).powi(2) * xi2 * sin2;

    let n_lead = n0 * output_fraction(c.s, theta, c.phi, PhotonCount::Approx);
    if !(n_lead > 0.0) {
        return Err(Error::PostSelectionSingular { theta });
    }
    let shot_lead = shot_factor * st2 / n_lead;
    let rp_lead = rp_factor * rp_scale / (n_lead * n_lead);

    // Exact conditional second moment against its small-phi value sigma~^2.
    let exact_moment = if c.phi == 0.0 {
        st2
    } else {
        exact_second_moment(c.s, theta, c.phi)?
    };
    let mut residual = shot_lead * (exact_moment / st2 - 1.0).abs() / (shot_lead + rp_lead);
    if intensity.i > 0.0 && intensity.i.is_finite() {
        let sql_form = 0.5 * sql * (shot_factor / intensity.i + intensity.i * rp_factor);
        let lead = shot_lead + rp_lead;
        residual = residual.max((sql_form - lead).abs() / lead);
    }
    if !(residual <= WEAK_REGIME_LIMIT) {
        return Err(Error::WeakRegimeViolation {
            residual,
            limit: WEAK_REGIME_LIMIT,
        });
    }

    let (shot, radiation_pressure) = match count {
        PhotonCount::Approx => (shot_lead, rp_lead),
        PhotonCount::Exact => {
            let n = n0 * output_fraction(c.s, theta, c.phi, PhotonCount::Exact);
            (
                shot_factor * exact_moment / n,
                rp_factor * rp_scale / (n * n),
            )
        }
    };

    Ok(NoiseBudget {
        shot,
        radiation_pressure,
        total: shot + radiation_pressure,
        sql_reference: sql,
        intensity_i: intensity.i,
        eta: intensity.eta,
        xi_r_variance: rp_factor * xi2,
        photon_count: count,
        expansion_residual: residual,
    })
}

/// `sqrt(T hbar / 2m)` in metres.
pub fn sql_displacement(pulse: &PulseParams) -> f64 {
    (pulse.interval() * HBAR / (2.0 * pulse.mirror_mass())).sqrt()
}

/// Displacement detectable at unit SNR when `I = 1`, and the SQL bound.
pub fn minimum_displacement(pulse: &PulseParams, sel: &SelectionParams) -> Displacements {
    let st = pulse.sigma_tilde();
    let ell_sql = sql_displacement(pulse);
    let ell_min = (1.0 + 1.0 / (st * st)).powf(0.25)
        * ell_sql
        * (0.5 * sel.theta()).cos().abs().powf(-0.5);
    Displacements { ell_min, ell_sql }
}

pub fn snr(pulse: &PulseParams, sel: &SelectionParams) -> Result<SnrReport> {
    let budget = total_variance(pulse, sel)?;
    snr_from_budget(pulse, sel, &budget)
}

/// SNR against an already computed (possibly squeezed) budget.
pub fn snr_from_budget(
    pulse: &PulseParams,
    sel: &SelectionParams,
    budget: &NoiseBudget,
) -> Result<SnrReport> {
    let signal = crate::heisenberg::weak_limit_shift(pulse, sel)?;
    let noise = budget.total.sqrt();
    let d = minimum_displacement(pulse, sel);
    Ok(SnrReport {
        signal,
        noise,
        snr: signal / noise,
        ell_min: d.ell_min,
        ell_sql: d.ell_sql,
    })
}

/// Optimal SNR reached at `I = 1`:
/// `(m c^2 / (8 T hbar omega0^2))^{1/2} (sigma~^2 / (1 + sigma~^2))^{1/4} |cos(theta/2)|^{1/2} |phi|`.
pub fn snr_at_sql(pulse: &PulseParams, sel: &SelectionParams) -> f64 {
    let st2 = pulse.sigma_tilde().powi(2);
    let w0 = pulse.omega0();
    let pre = units::rest_energy(pulse.mirror_mass()) / (8.0 * pulse.interval() * HBAR * w0 * w0);
    pre.sqrt()
        * (st2 / (1.0 + st2)).powf(0.25)
        * (0.5 * sel.theta()).cos().abs().sqrt()
        * sel.phi(pulse).abs()
}

/// Same pulse with `N0` chosen so that the measurement intensity equals `target`.
pub fn pulse_for_intensity(pulse: &PulseParams, theta: f64, target: f64) -> Result<PulseParams> {
    let eta = measurement_intensity(pulse, theta).eta;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid(
            "theta",
            format!("mirror susceptibility vanishes at theta = {theta}"),
        ));
    }
    pulse.with_photon_number(target / eta)
}

/// `(I, total / SQL)` with `N0` retuned for each requested intensity.
pub fn intensity_sweep(
    pulse: &PulseParams,
    sel: &SelectionParams,
    intensities: &[f64],
) -> Result<Vec<(f64, f64)>> {
    intensities
        .iter()
        .map(|&i| {
            let p = pulse_for_intensity(pulse, sel.theta(), i)?;
            let b = total_variance(&p, sel)?;
            Ok((b.intensity_i, b.sql_ratio()))
        })
        .collect()
}

/// Scalar noise report written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseReport {
    pub params: ParamSet,
    pub shot: f64,
    pub radiation_pressure: f64,
    pub total: f64,
    pub sql: f64,
    #[serde(rename = "I")]
    pub intensity: f64,
    pub snr: f64,
    pub ell_min_m: f64,
    pub ell_sql_m: f64,
}

impl NoiseReport {
    pub fn new(pulse: &PulseParams, sel: &SelectionParams, budget: &NoiseBudget, snr: &SnrReport) -> Self {
        Self {
            params: ParamSet::from_params(pulse, sel),
            shot: budget.shot,
            radiation_pressure: budget.radiation_pressure,
            total: budget.total,
            sql: budget.sql_reference,
            intensity: budget.intensity_i,
            snr: snr.snr,
            ell_min_m: snr.ell_min,
            ell_sql_m: snr.ell_sql,
        }
    }
}
