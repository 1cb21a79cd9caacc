//! Output photon-number distribution at the dark port and its conditional
//! frequency moments.
//!
//! Frequencies are expressed through the normalized sideband
//! `Omega~ = (omega - omega0) / omega0`. Moments use the closed forms, which
//! extend the frequency integrals over the whole real line; the quadrature
//! cross-checks live in [`crate::oracle`].

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::one_minus_damped_cos;
use crate::params::{derive_coupling, weak_value, PulseParams, SelectionParams};

/// Whether the grid may extend below `Omega~ = -1` (negative optical frequencies).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    Physical,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyGrid {
    points: Vec<f64>,
    mode: GridMode,
    spacing: Spacing,
}

pub const DEFAULT_GRID_POINTS: usize = 4001;
pub const DEFAULT_GRID_HALF_WIDTH: f64 = 5.0;

impl FrequencyGrid {
    pub fn uniform(lo: f64, hi: f64, n: usize, mode: GridMode) -> Result<Self> {
        if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(
                "grid",
                format!("need n >= 2 and lo < hi, got n = {n}, [{lo}, {hi}]"),
            ));
        }
        if mode == GridMode::Physical && lo < -1.0 {
            return Err(Error::invalid(
                "grid",
                format!("physical grid must start at Omega~ >= -1, got {lo}"),
            ));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|k| lo + step * k as f64).collect();
        points[n - 1] = hi;
        Ok(Self {
            points,
            mode,
            spacing: Spacing::Uniform,
        })
    }

    /// 4001 uniform points over `[-5 sigma~, 5 sigma~]`, clipped at `-1` in physical mode.
    pub fn default_for(sigma_tilde: f64, mode: GridMode) -> Self {
        let half = DEFAULT_GRID_HALF_WIDTH * sigma_tilde;
        let lo = match mode {
            GridMode::Physical => (-half).max(-1.0),
            GridMode::Extended => -half,
        };
        Self::uniform(lo, half, DEFAULT_GRID_POINTS, mode).expect("default grid is valid")
    }

    pub fn from_points(points: Vec<f64>, mode: GridMode) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("grid", "need at least two points"));
        }
        if !points.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::invalid("grid", "points must be strictly increasing"));
        }
        if mode == GridMode::Physical && points[0] < -1.0 {
            return Err(Error::invalid(
                "grid",
                format!("physical grid must start at Omega~ >= -1, got {}", points[0]),
            ));
        }
        Ok(Self {
            points,
            mode,
            spacing: Spacing::Custom,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.points[0], self.points[self.points.len() - 1])
    }

    /// Trapezoid rule over the grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.points.len());
        self.points
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }
}

/// Sampled `n(Omega~)` in units of `N0 / omega0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyDistribution {
    grid: FrequencyGrid,
    values: Vec<f64>,
    /// Input photon number `N0`.
    photon_number: f64,
    /// Output photon number `N` used for `rho`.
    total_photons: f64,
    normalized: bool,
}

impl FrequencyDistribution {
    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    /// `n(Omega~)` in units of `N0 / omega0`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total_photons(&self) -> f64 {
        self.total_photons
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Probability density `omega0 n / (2 pi N)`; identically zero when `N = 0`.
    pub fn rho(&self) -> Vec<f64> {
        if self.total_photons == 0.0 {
            return vec![0.0; self.values.len()];
        }
        let k = self.photon_number / (2.0 * PI * self.total_photons);
        self.values.iter().map(|v| v * k).collect()
    }

    /// Renormalize against the photon number found on the grid itself, so that
    /// `rho` integrates to one over the sampled domain.
    pub fn normalized(mut self) -> Result<Self> {
        let on_grid = self.photon_number * self.grid.trapezoid(&self.values) / (2.0 * PI);
        if !(on_grid > 0.0) {
            return Err(Error::PostSelectionSingular { theta: f64::NAN });
        }
        self.total_photons = on_grid;
        self.normalized = true;
        Ok(self)
    }

    /// CSV with a `#`-commented header block. Columns:
    /// `omega_tilde,n_bar_units_N0_over_omega0,rho`.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[(String, String)]) -> io::Result<()> {
        for (k, v) in header {
            writeln!(out, "# {k} = {v}")?;
        }
        writeln!(out, "# normalized = {}", self.normalized)?;
        writeln!(out, "# total_photons_over_N0 = {:.12e}", self.total_fraction())?;
        writeln!(out, "omega_tilde,n_bar_units_N0_over_omega0,rho")?;
        let rho = self.rho();
        for ((x, v), r) in self.grid.points.iter().zip(&self.values).zip(&rho) {
            writeln!(out, "{x:.6e},{v:.10e},{r:.10e}")?;
        }
        Ok(())
    }

    fn total_fraction(&self) -> f64 {
        if self.photon_number == 0.0 {
            0.0
        } else {
            self.total_photons / self.photon_number
        }
    }
}

/// Dark-port density in units of `N0 / omega0` at one sideband.
#[inline]
pub fn density(omega_tilde: f64, sigma_tilde: f64, theta: f64, phi: f64) -> f64 {
    let envelope = (-0.5 * (omega_tilde / sigma_tilde).powi(2)).exp();
    let fringe = (0.5 * theta + 0.5 * (1.0 + omega_tilde) * phi).sin();
    (2.0 * PI).sqrt() / sigma_tilde * envelope * fringe * fringe
}

pub fn photon_distribution(
    grid: &FrequencyGrid,
    pulse: &PulseParams,
    sel: &SelectionParams,
) -> FrequencyDistribution {
    let st = pulse.sigma_tilde();
    let phi = sel.phi(pulse);
    let theta = sel.theta();
    let values = grid
        .points
        .iter()
        .map(|&x| density(x, st, theta, phi))
        .collect();
    FrequencyDistribution {
        grid: grid.clone(),
        values,
        photon_number: pulse.photon_number(),
        total_photons: total_output_photons(pulse, sel, PhotonCount::Exact),
        normalized: false,
    }
}

/// How the output photon number is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhotonCount {
    /// `N = (N0/2) [1 - e^{-s} cos(theta + phi)]`
    Exact,
    /// `N = N0 sin^2(theta/2)`, the small-phi form used in the noise budget.
    Approx,
}

/// Output photon number as a fraction of `N0`.
pub fn output_fraction(s: f64, theta: f64, phi: f64, mode: PhotonCount) -> f64 {
    match mode {
        PhotonCount::Exact => 0.5 * one_minus_damped_cos(s, theta + phi),
        PhotonCount::Approx => (0.5 * theta).sin().powi(2),
    }
}

pub fn total_output_photons(pulse: &PulseParams, sel: &SelectionParams, mode: PhotonCount) -> f64 {
    let c = derive_coupling(sel, pulse);
    pulse.photon_number() * output_fraction(c.s, sel.theta(), c.phi, mode)
}

/// `e^{-s} sin(theta + phi) / (1 - e^{-s} cos(theta + phi))` and the matching
/// cosine ratio; errors when no photons reach the output.
fn fringe_ratios(s: f64, theta: f64, phi: f64) -> Result<(f64, f64)> {
    let d = one_minus_damped_cos(s, theta + phi);
    if !(d > 0.0) {
        return Err(Error::PostSelectionSingular { theta });
    }
    let damp = (-s).exp();
    Ok((damp * (theta + phi).sin() / d, damp * (theta + phi).cos() / d))
}

/// `<Omega~> = (2s/phi) e^{-s} sin(theta+phi) / (1 - e^{-s} cos(theta+phi))`
pub fn mean_shift(s: f64, theta: f64, phi: f64) -> Result<f64> {
    let (sin_ratio, _) = fringe_ratios(s, theta, phi)?;
    if phi == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * s / phi * sin_ratio)
}

/// `<Omega~^2> = (2s/phi^2) [1 + 2 s e^{-s} cos(theta+phi) / (1 - e^{-s} cos(theta+phi))]`
pub fn second_moment(s: f64, theta: f64, phi: f64) -> Result<f64> {
    let (_, cos_ratio) = fringe_ratios(s, theta, phi)?;
    Ok(2.0 * s / (phi * phi) * (1.0 + 2.0 * s * cos_ratio))
}

pub fn mean_frequency_shift(pulse: &PulseParams, sel: &SelectionParams) -> Result<f64> {
    let c = derive_coupling(sel, pulse);
    let st = pulse.sigma_tilde();
    let (sin_ratio, _) = fringe_ratios(c.s, sel.theta(), c.phi)?;
    // 2s/phi = sigma~^2 phi
    Ok(st * st * c.phi * sin_ratio)
}

pub fn second_frequency_moment(pulse: &PulseParams, sel: &SelectionParams) -> Result<f64> {
    let c = derive_coupling(sel, pulse);
    let st = pulse.sigma_tilde();
    let (_, cos_ratio) = fringe_ratios(c.s, sel.theta(), c.phi)?;
    Ok(st * st * (1.0 + 2.0 * c.s * cos_ratio))
}

/// Small-phi expansion of the shift, `sigma~^2 |phi cot(theta/2)| = sigma~^2 |phi A_w|`.
pub fn weak_limit_shift(pulse: &PulseParams, sel: &SelectionParams) -> Result<f64> {
    let st = pulse.sigma_tilde();
    let phi = sel.phi(pulse);
    if phi == 0.0 {
        return Ok(0.0);
    }
    let aw = weak_value(sel.theta())?;
    Ok(st * st * (phi * aw.norm()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiducial;

    fn fig_selection(theta: f64, phi: f64) -> (PulseParams, SelectionParams) {
        let pulse = fiducial::si_pulse();
        let sel = SelectionParams::from_phase(theta, phi, &pulse).unwrap();
        (pulse, sel)
    }

    #[test]
    fn density_at_carrier() {
        // sqrt(2 pi) sin^2(5.5e-4), evaluated by hand
        let expected = 2.506_628_274_631 * (5.5e-4f64).sin().powi(2);
        let v = density(0.0, 1.0, 1e-3, 1e-4);
        assert!((v / expected - 1.0).abs() < 1e-12);
        assert!((v - 7.58e-7).abs() < 0.01e-7);
        // second point: Omega~ = 1, phase theta/2 + phi
        let expected = 2.506_628_274_631 * (-0.5f64).exp() * (6e-4f64).sin().powi(2);
        assert!((density(1.0, 1.0, 1e-3, 1e-4) / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dark_port_stays_dark() {
        let (pulse, sel) = fig_selection(0.0, 0.0);
        let grid = FrequencyGrid::default_for(1.0, GridMode::Physical);
        let d = photon_distribution(&grid, &pulse, &sel);
        assert!(d.values().iter().all(|&v| v == 0.0));
        assert!(d.rho().iter().all(|&v| v == 0.0));
        assert_eq!(d.total_photons(), 0.0);
    }

    #[test]
    fn photon_number_examples() {
        let (pulse, sel) = fig_selection(PI, 0.0);
        let n0 = pulse.photon_number();
        assert!((total_output_photons(&pulse, &sel, PhotonCount::Exact) / n0 - 1.0).abs() < 1e-15);

        let (pulse, sel) = fig_selection(1e-3, 1e-4);
        let exact = total_output_photons(&pulse, &sel, PhotonCount::Exact) / n0;
        let approx = total_output_photons(&pulse, &sel, PhotonCount::Approx) / n0;
        assert!((exact - 3.05e-7).abs() < 0.005e-7, "{exact}");
        assert!((approx - 2.50e-7).abs() < 0.005e-7, "{approx}");

        let tiny = output_fraction(1e-20, 1e-8, 1e-8, PhotonCount::Exact);
        assert!((tiny / 1e-16 - 1.0).abs() < 1e-3, "{tiny}");
    }

    #[test]
    fn shift_examples() {
        let (pulse, sel) = fig_selection(1e-3, 1e-4);
        let shift = mean_frequency_shift(&pulse, &sel).unwrap();
        assert!((shift - 0.180).abs() < 0.001, "{shift}");
        let lin = weak_limit_shift(&pulse, &sel).unwrap();
        assert!((lin - 0.200).abs() < 1e-6);

        let (pulse, sel) = fig_selection(PI - 1e-4, 1e-4);
        assert!(mean_frequency_shift(&pulse, &sel).unwrap().abs() < 1e-15);

        let (pulse, sel) = fig_selection(PI, 1e-4);
        assert!(weak_limit_shift(&pulse, &sel).unwrap().abs() < 1e-15);
    }

    #[test]
    fn halving_theta_doubles_linear_shift() {
        let (pulse, a) = fig_selection(1e-4, 1e-7);
        let (_, b) = fig_selection(5e-5, 1e-7);
        let ratio = weak_limit_shift(&pulse, &b).unwrap() / weak_limit_shift(&pulse, &a).unwrap();
        assert!((ratio - 2.0).abs() < 1e-8);
    }

    #[test]
    fn second_moment_at_quadrature_point() {
        let st = 0.6;
        let phi = 2e-3;
        let s = st * st * phi * phi / 2.0;
        let v = second_moment(s, PI / 2.0 - phi, phi).unwrap();
        assert!((v - st * st).abs() < 1e-15);
        assert!((second_moment(1e-16, 0.3, 1e-8).unwrap() / (2e-16 / 1e-16) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn singular_without_output() {
        let (pulse, sel) = fig_selection(0.0, 0.0);
        assert!(matches!(
            mean_frequency_shift(&pulse, &sel),
            Err(Error::PostSelectionSingular { .. })
        ));
        assert!(second_frequency_moment(&pulse, &sel).is_err());
    }

    #[test]
    fn normalized_distribution_integrates_to_one() {
        let (pulse, sel) = fig_selection(1e-3, 1e-4);
        for mode in [GridMode::Physical, GridMode::Extended] {
            let grid = FrequencyGrid::default_for(1.0, mode);
            let d = photon_distribution(&grid, &pulse, &sel).normalized().unwrap();
            let integral = grid.trapezoid(&d.rho());
            assert!((integral - 1.0).abs() < 1e-6, "{integral}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(FrequencyGrid::uniform(-2.0, 1.0, 10, GridMode::Physical).is_err());
        assert!(FrequencyGrid::uniform(-2.0, 1.0, 10, GridMode::Extended).is_ok());
        assert!(FrequencyGrid::from_points(vec![0.0, 0.0, 1.0], GridMode::Extended).is_err());
        let g = FrequencyGrid::default_for(1.0, GridMode::Physical);
        assert_eq!(g.domain(), (-1.0, 5.0));
        assert_eq!(g.points().len(), DEFAULT_GRID_POINTS);
    }

    #[test]
    fn csv_layout() {
        let (pulse, sel) = fig_selection(1e-3, 1e-4);
        let grid = FrequencyGrid::uniform(-1.0, 1.0, 3, GridMode::Physical).unwrap();
        let d = photon_distribution(&grid, &pulse, &sel);
        let mut buf = Vec::new();
        d.write_csv(&mut buf, &[("theta".into(), "1e-3".into())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# theta = 1e-3");
        assert_eq!(lines[3], "omega_tilde,n_bar_units_N0_over_omega0,rho");
        assert_eq!(lines.len(), 7);
        assert!(lines[5].starts_with("0.000000e0,"));
    }
}
