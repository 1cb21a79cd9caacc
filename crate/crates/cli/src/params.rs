//! Command-line parameter overrides on top of the fiducial set.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use wva_core::units::GRAM;
use wva_core::{fiducial, ParamSet, PulseParams, SelectionParams};

#[derive(Args, Clone, Debug, Default)]
pub struct ParamArgs {
    /// Flat key = value parameter file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Post-selection offset (rad).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Displacement phase 4 omega0 ell / c (rad).
    #[arg(long, conflicts_with = "ell_m")]
    pub phi: Option<f64>,
    /// Mirror displacement (m).
    #[arg(long = "ell-m")]
    pub ell_m: Option<f64>,
    /// Relative spectral width sigma_omega / omega0.
    #[arg(long = "sigma-tilde")]
    pub sigma_tilde: Option<f64>,
    /// Carrier angular frequency (rad/s).
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Mirror mass (g).
    #[arg(long = "mass-g")]
    pub mass_g: Option<f64>,
    /// Pulse interval (s).
    #[arg(long = "interval-s")]
    pub interval_s: Option<f64>,
    /// Pulse energy (J).
    #[arg(long = "pulse-energy-j")]
    pub pulse_energy_j: Option<f64>,
}

enum Displacement {
    Phase(f64),
    Metres(f64),
}

impl ParamArgs {
    /// True when the user picked the selection explicitly.
    pub fn selects_curve(&self) -> bool {
        self.theta.is_some() || self.phi.is_some() || self.ell_m.is_some() || self.config.is_some()
    }

    pub fn with_curve(&self, theta: f64, phi: f64) -> Self {
        Self {
            theta: Some(theta),
            phi: Some(phi),
            ell_m: None,
            ..self.clone()
        }
    }

    /// Defaults of the photon-distribution figures (`phi = 1e-4`).
    pub fn resolve_figure(&self) -> Result<(PulseParams, SelectionParams)> {
        self.resolve(Displacement::Phase(fiducial::FIGURE_PHI))
    }

    /// Defaults of the noise budget (`ell = 1e-17 m`).
    pub fn resolve_noise(&self) -> Result<(PulseParams, SelectionParams)> {
        self.resolve(Displacement::Metres(fiducial::NOISE_ELL_M))
    }

    fn resolve(&self, default: Displacement) -> Result<(PulseParams, SelectionParams)> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                ParamSet::parse(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => ParamSet::default(),
        };
        let omega0 = self.omega0.or(file.omega0).unwrap_or(fiducial::OMEGA0);
        let sigma_omega = match (self.sigma_tilde, file.sigma_omega) {
            (Some(st), _) => st * omega0,
            (None, Some(s)) => s,
            (None, None) => fiducial::SIGMA_TILDE * omega0,
        };
        let (ell, phi) = match default {
            Displacement::Phase(p) => (None, Some(p)),
            Displacement::Metres(m) => (Some(m), None),
        };
        let base = ParamSet {
            omega0: Some(fiducial::OMEGA0),
            sigma_omega: None,
            pulse_energy: Some(fiducial::PULSE_ENERGY),
            photon_number: None,
            interval: Some(fiducial::INTERVAL),
            mass: Some(fiducial::MASS),
            theta: Some(fiducial::THETA),
            ell,
            phi,
        };
        let flags = ParamSet {
            omega0: Some(omega0),
            sigma_omega: Some(sigma_omega),
            pulse_energy: self.pulse_energy_j,
            photon_number: None,
            interval: self.interval_s,
            mass: self.mass_g.map(|g| g * GRAM),
            theta: self.theta,
            ell: self.ell_m,
            phi: self.phi,
        };
        let set = flags.overlay_on(&file.overlay_on(&base));
        Ok(set.resolve()?)
    }
}

/// Resolved parameters echoed into every output header.
pub fn param_header(pulse: &PulseParams, sel: &SelectionParams) -> Vec<(String, String)> {
    let kv = |k: &str, v: f64| (k.to_string(), format!("{v:e}"));
    vec![
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        kv("omega0", pulse.omega0()),
        kv("sigma_omega", pulse.sigma_omega()),
        kv("sigma_tilde", pulse.sigma_tilde()),
        kv("photon_number", pulse.photon_number()),
        kv("interval", pulse.interval()),
        kv("mass", pulse.mirror_mass()),
        kv("theta", sel.theta()),
        kv("ell", sel.ell_metres()),
        kv("phi", sel.phi(pulse)),
    ]
}
