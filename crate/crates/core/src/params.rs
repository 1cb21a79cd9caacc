//! Physical parameters and the dimensionless quantities derived from them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{self, HBAR};

/// How the pulse size is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSize {
    /// Energy per pulse `P0` in joules.
    Energy(f64),
    /// Effective photon number `N0 = P0 / (hbar omega0)`.
    Photons(f64),
}

/// A Gaussian laser pulse hitting the mirrors once per `interval`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseParams {
    omega0: f64,
    sigma_omega: f64,
    photon_number: f64,
    interval: f64,
    mirror_mass: f64,
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && !v.is_nan() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

impl PulseParams {
    /// `omega0` and `sigma_omega` in rad/s, `interval` in seconds,
    /// `mirror_mass` in kilograms. An infinite mass is accepted and switches
    /// radiation pressure off.
    pub fn new(
        omega0: f64,
        sigma_omega: f64,
        size: PulseSize,
        interval: f64,
        mirror_mass: f64,
    ) -> Result<Self> {
        let omega0 = positive("omega0", omega0)?;
        if !omega0.is_finite() {
            return Err(Error::invalid("omega0", "must be finite"));
        }
        let sigma_omega = positive("sigma_omega", sigma_omega)?;
        if sigma_omega > omega0 {
            return Err(Error::invalid(
                "sigma_omega",
                format!(
                    "spectral width {sigma_omega:e} exceeds omega0 {omega0:e}; sigma_omega/omega0 must lie in (0, 1]"
                ),
            ));
        }
        let photon_number = match size {
            PulseSize::Energy(e) => e / (HBAR * omega0),
            PulseSize::Photons(n) => n,
        };
        if !(photon_number >= 0.0 && photon_number.is_finite()) {
            return Err(Error::invalid(
                "photon_number",
                format!("must be finite and >= 0, got {photon_number}"),
            ));
        }
        let interval = positive("interval", interval)?;
        let mirror_mass = positive("mass", mirror_mass)?;
        Ok(Self {
            omega0,
            sigma_omega,
            photon_number,
            interval,
            mirror_mass,
        })
    }

    /// Pulse described by its relative spectral width `sigma_tilde = sigma_omega / omega0`.
    pub fn with_sigma_tilde(
        omega0: f64,
        sigma_tilde: f64,
        size: PulseSize,
        interval: f64,
        mirror_mass: f64,
    ) -> Result<Self> {
        Self::new(omega0, sigma_tilde * omega0, size, interval, mirror_mass)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn sigma_omega(&self) -> f64 {
        self.sigma_omega
    }

    pub fn sigma_tilde(&self) -> f64 {
        self.sigma_omega / self.omega0
    }

    /// Effective input photon number `N0`.
    pub fn photon_number(&self) -> f64 {
        self.photon_number
    }

    /// Energy per pulse `P0 = N0 hbar omega0` (J).
    pub fn pulse_energy(&self) -> f64 {
        self.photon_number * HBAR * self.omega0
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn mirror_mass(&self) -> f64 {
        self.mirror_mass
    }

    pub fn with_photon_number(self, n0: f64) -> Result<Self> {
        Self::new(
            self.omega0,
            self.sigma_omega,
            PulseSize::Photons(n0),
            self.interval,
            self.mirror_mass,
        )
    }

    pub fn with_interval(self, interval: f64) -> Result<Self> {
        Self::new(
            self.omega0,
            self.sigma_omega,
            PulseSize::Photons(self.photon_number),
            interval,
            self.mirror_mass,
        )
    }

    pub fn with_mass(self, mass: f64) -> Result<Self> {
        Self::new(
            self.omega0,
            self.sigma_omega,
            PulseSize::Photons(self.photon_number),
            self.interval,
            mass,
        )
    }

    /// Recoil time scale `hbar omega0 T / (m c^2)` (s): how far one photon's
    /// momentum kick moves the mirror during one interval, as a time.
    pub(crate) fn recoil_time(&self) -> f64 {
        HBAR * self.omega0 * self.interval / units::rest_energy(self.mirror_mass)
    }
}

/// Post-selection offset and mirror displacement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionParams {
    theta: f64,
    /// Differential displacement stored as a light travel time (s).
    ell: f64,
}

fn check_theta(theta: f64) -> Result<f64> {
    if theta.is_finite() && theta > -PI && theta <= PI {
        Ok(theta)
    } else {
        Err(Error::invalid(
            "theta",
            format!("must lie in (-pi, pi], got {theta}"),
        ))
    }
}

impl SelectionParams {
    /// `ell_m` is the differential mirror displacement in metres.
    pub fn new(theta: f64, ell_m: f64) -> Result<Self> {
        if !ell_m.is_finite() {
            return Err(Error::invalid("ell", "must be finite"));
        }
        Ok(Self {
            theta: check_theta(theta)?,
            ell: units::length_to_time(ell_m),
        })
    }

    /// Selection defined by the displacement phase `phi = 4 omega0 ell`.
    pub fn from_phase(theta: f64, phi: f64, pulse: &PulseParams) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        Ok(Self {
            theta: check_theta(theta)?,
            ell: phi / (4.0 * pulse.omega0),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Displacement as a light travel time (s).
    pub fn ell_time(&self) -> f64 {
        self.ell
    }

    pub fn ell_metres(&self) -> f64 {
        units::time_to_length(self.ell)
    }

    pub fn phi(&self, pulse: &PulseParams) -> f64 {
        4.0 * pulse.omega0 * self.ell
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        Ok(Self {
            theta: check_theta(theta)?,
            ..self
        })
    }
}

/// Interaction strength of the which-path/frequency coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingParams {
    /// Measurement strength `s = 2 g^2 sigma_omega^2`.
    pub s: f64,
    /// Displacement phase `phi = -2 g omega0`.
    pub phi: f64,
    /// Coupling `g = -2 ell` (s).
    pub g: f64,
}

pub fn derive_coupling(sel: &SelectionParams, pulse: &PulseParams) -> CouplingParams {
    let ell = sel.ell_time();
    let g = -2.0 * ell;
    CouplingParams {
        s: 8.0 * pulse.sigma_omega * pulse.sigma_omega * ell * ell,
        phi: 4.0 * pulse.omega0 * ell,
        g,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValue(pub Complex64);

impl WeakValue {
    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// True when `theta` is a multiple of 2 pi up to rounding.
pub(crate) fn is_dark_fringe(theta: f64) -> bool {
    let r = theta.rem_euclid(TAU);
    r.min(TAU - r) <= 8.0 * f64::EPSILON * theta.abs().max(1.0)
}

/// `A_w = -i cot(theta / 2)` for the symmetric Michelson post-selection.
pub fn weak_value(theta: f64) -> Result<WeakValue> {
    if !theta.is_finite() || is_dark_fringe(theta) {
        return Err(Error::PostSelectionSingular { theta });
    }
    let half = 0.5 * theta;
    Ok(WeakValue(Complex64::new(0.0, -half.cos() / half.sin())))
}

/// Measurement intensity `I = N0 eta` and mirror susceptibility `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Intensity {
    pub i: f64,
    pub eta: f64,
}

pub fn measurement_intensity(pulse: &PulseParams, theta: f64) -> Intensity {
    let st = pulse.sigma_tilde();
    let eta = 4.0
        * pulse.recoil_time()
        * pulse.sigma_omega
        * (0.5 * theta).cos().abs()
        * (1.0 + st * st).sqrt();
    Intensity {
        i: pulse.photon_number * eta,
        eta,
    }
}

/// Flat key/value parameter file.
///
/// ```text
/// omega0 = 1.8e15
/// sigma_omega = 1.8e15
/// pulse_energy = 10.0
/// interval = 1e-3
/// mass = 1e-3
/// theta = 1e-3
/// ell = 1e-17
/// ```
///
/// `pulse_energy` and `photon_number` are mutually exclusive, as are `ell`
/// (metres) and `phi` (rad).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulse_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub photon_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

impl ParamSet {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_config_string(&self) -> String {
        toml::to_string(self).expect("flat f64 table always serializes")
    }

    /// Fully resolved set with `photon_number` and `ell`.
    pub fn from_params(pulse: &PulseParams, sel: &SelectionParams) -> Self {
        Self {
            omega0: Some(pulse.omega0),
            sigma_omega: Some(pulse.sigma_omega),
            pulse_energy: None,
            photon_number: Some(pulse.photon_number),
            interval: Some(pulse.interval),
            mass: Some(pulse.mirror_mass),
            theta: Some(sel.theta),
            ell: Some(sel.ell_metres()),
            phi: None,
        }
    }

    /// Fill every unset key from `base`.
    pub fn overlay_on(&self, base: &ParamSet) -> ParamSet {
        let pick = |a: Option<f64>, b: Option<f64>| a.or(b);
        let size_set = self.pulse_energy.is_some() || self.photon_number.is_some();
        let disp_set = self.ell.is_some() || self.phi.is_some();
        ParamSet {
            omega0: pick(self.omega0, base.omega0),
            sigma_omega: pick(self.sigma_omega, base.sigma_omega),
            pulse_energy: if size_set { self.pulse_energy } else { base.pulse_energy },
            photon_number: if size_set { self.photon_number } else { base.photon_number },
            interval: pick(self.interval, base.interval),
            mass: pick(self.mass, base.mass),
            theta: pick(self.theta, base.theta),
            ell: if disp_set { self.ell } else { base.ell },
            phi: if disp_set { self.phi } else { base.phi },
        }
    }

    pub fn resolve(&self) -> Result<(PulseParams, SelectionParams)> {
        fn req(v: Option<f64>, key: &str) -> Result<f64> {
            v.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
        }
        let size = match (self.pulse_energy, self.photon_number) {
            (Some(e), None) => PulseSize::Energy(e),
            (None, Some(n)) => PulseSize::Photons(n),
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "`pulse_energy` and `photon_number` are mutually exclusive".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config(
                    "missing key `pulse_energy` or `photon_number`".into(),
                ))
            }
        };
        let pulse = PulseParams::new(
            req(self.omega0, "omega0")?,
            req(self.sigma_omega, "sigma_omega")?,
            size,
            req(self.interval, "interval")?,
            req(self.mass, "mass")?,
        )?;
        let theta = req(self.theta, "theta")?;
        let sel = match (self.ell, self.phi) {
            (Some(ell), None) => SelectionParams::new(theta, ell)?,
            (None, Some(phi)) => SelectionParams::from_phase(theta, phi, &pulse)?,
            (Some(_), Some(_)) => {
                return Err(Error::Config("`ell` and `phi` are mutually exclusive".into()))
            }
            (None, None) => return Err(Error::Config("missing key `ell` or `phi`".into())),
        };
        Ok((pulse, sel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiducial;
    use crate::units::C;

    #[test]
    fn coupling_for_phase_example() {
        let pulse = fiducial::si_pulse();
        let sel = SelectionParams::from_phase(1e-3, 1e-4, &pulse).unwrap();
        let c = derive_coupling(&sel, &pulse);
        assert!((c.phi - 1e-4).abs() < 1e-18);
        assert!((c.s / 5e-9 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_displacement_has_no_coupling() {
        let pulse = fiducial::si_pulse();
        let c = derive_coupling(&SelectionParams::new(0.3, 0.0).unwrap(), &pulse);
        assert_eq!(c.s, 0.0);
        assert_eq!(c.phi, 0.0);
    }

    #[test]
    fn si_displacement_phase() {
        let pulse = fiducial::si_pulse();
        let c = derive_coupling(&SelectionParams::new(1e-3, 1.25e-13).unwrap(), &pulse);
        // 4 * 1.8e15 * 1.25e-13 / c by hand: 900 / 299792458
        let by_hand = 900.0 / 299_792_458.0;
        assert!((c.phi / by_hand - 1.0).abs() < 1e-14);
        assert!((c.phi - 3.0e-6).abs() < 0.01e-6);
        assert!((c.g + 2.0 * 1.25e-13 / C).abs() < 1e-35);
    }

    #[test]
    fn weak_value_examples() {
        assert!(weak_value(PI).unwrap().norm() < 1e-16);
        let w = weak_value(PI / 2.0).unwrap().value();
        assert!(w.re == 0.0 && (w.im + 1.0).abs() < 1e-15);
        // cot(x) = 1/x - x/3 - x^3/45 - ... at x = 5e-4
        let x: f64 = 5e-4;
        let series = 1.0 / x - x / 3.0 - x.powi(3) / 45.0;
        let w = weak_value(1e-3).unwrap().value();
        assert_eq!(w.re, 0.0);
        assert!((-w.im / series - 1.0).abs() < 1e-14);
        assert!((w.norm() - 2000.0).abs() < 1e-3);
    }

    #[test]
    fn weak_value_rejects_dark_fringe() {
        assert!(matches!(
            weak_value(0.0),
            Err(Error::PostSelectionSingular { .. })
        ));
        assert!(weak_value(TAU).is_err());
        assert!(weak_value(-2.0 * TAU).is_err());
    }

    #[test]
    fn intensity_matches_quoted_estimate() {
        let pulse = fiducial::si_pulse();
        let i = measurement_intensity(&pulse, 1e-3);
        assert!((i.i / 1.1 - 1.0).abs() < 0.05, "I = {}", i.i);
    }

    #[test]
    fn intensity_zero_without_photons_and_linear_in_energy() {
        let pulse = fiducial::si_pulse();
        assert_eq!(
            measurement_intensity(&pulse.with_photon_number(0.0).unwrap(), 1e-3).i,
            0.0
        );
        let doubled = PulseParams::new(
            pulse.omega0(),
            pulse.sigma_omega(),
            PulseSize::Energy(20.0),
            pulse.interval(),
            pulse.mirror_mass(),
        )
        .unwrap();
        let a = measurement_intensity(&pulse, 1e-3);
        let b = measurement_intensity(&doubled, 1e-3);
        assert!((b.i / a.i - 2.0).abs() < 1e-14);
        assert!((b.i - 2.266).abs() < 0.01);
        assert_eq!(a.eta, b.eta);
    }

    #[test]
    fn rejects_wide_spectrum_and_bad_theta() {
        let err = PulseParams::with_sigma_tilde(1e15, 1.01, PulseSize::Photons(1.0), 1.0, 1.0);
        assert!(err.is_err());
        assert!(SelectionParams::new(-PI, 0.0).is_err());
        assert!(SelectionParams::new(PI, 0.0).is_ok());
        assert!(SelectionParams::new(3.2, 0.0).is_err());
    }

    #[test]
    fn config_round_trip_and_exclusivity() {
        let pulse = fiducial::si_pulse();
        let sel = fiducial::noise_selection();
        let text = ParamSet::from_params(&pulse, &sel).to_config_string();
        let (p2, s2) = ParamSet::parse(&text).unwrap().resolve().unwrap();
        assert!((p2.photon_number() / pulse.photon_number() - 1.0).abs() < 1e-15);
        assert!((s2.ell_time() / sel.ell_time() - 1.0).abs() < 1e-15);

        let both = "omega0 = 1.0\nsigma_omega = 0.5\npulse_energy = 1.0\nphoton_number = 2.0\ninterval = 1.0\nmass = 1.0\ntheta = 0.1\nell = 0.0\n";
        assert!(ParamSet::parse(both).unwrap().resolve().is_err());
        assert!(ParamSet::parse("colour = 3.0").is_err());
    }
}
