//! Independent numerical paths used to check the closed forms.

mod monte_carlo;

pub use monte_carlo::{monte_carlo_ensemble, McConfig, McEstimate, McManifest, DEFAULT_BINS, DEFAULT_HALF_WIDTH, POISSON_INVERSION_LIMIT};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{PulseParams, SelectionParams};
use crate::quadrature::{integrate, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianIntegrals {
    pub analytic_cos: f64,
    pub analytic_sin: f64,
    pub quadrature_cos: f64,
    pub quadrature_sin: f64,
}

pub const GAUSSIAN_CHECK_TOL: f64 = 1e-12;

/// `int exp(-a x^2) cos(2 b x + c) dx = sqrt(pi/a) e^{-b^2/a} cos c` and the sine
/// counterpart, analytic and by adaptive quadrature over the real line.
pub fn gaussian_integral_check(a: f64, b: f64, c: f64) -> Result<GaussianIntegrals> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid("a", format!("must be > 0, got {a}")));
    }
    let pre = (PI / a).sqrt() * (-b * b / a).exp();
    // absolute floor relative to the Gaussian mass, for integrals that vanish
    let floor = GAUSSIAN_CHECK_TOL * (PI / a).sqrt() * 1e-3;
    let qc = integrate(|x| (-a * x * x).exp() * (2.0 * b * x + c).cos(), Domain::Real, GAUSSIAN_CHECK_TOL, floor)?;
    let qs = integrate(|x| (-a * x * x).exp() * (2.0 * b * x + c).sin(), Domain::Real, GAUSSIAN_CHECK_TOL, floor)?;
    Ok(GaussianIntegrals {
        analytic_cos: pre * c.cos(),
        analytic_sin: pre * c.sin(),
        quadrature_cos: qc.value,
        quadrature_sin: qs.value,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrationDomain {
    /// `Omega~ >= -1`: positive photon frequencies only.
    Physical,
    /// `Omega~` over the whole real line.
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureMoments {
    /// Output photon number.
    pub n: f64,
    /// `<Omega~>`
    pub mean: f64,
    /// `<Omega~^2>`
    pub second: f64,
}

const COARSE_TOL: f64 = 1e-11;
const FINE_TOL: f64 = 1e-13;
const AGREEMENT: f64 = 1e-8;

/// Conditional photon number and moments by direct integration of the output
/// spectrum `N0 / (sqrt(2 pi) sigma~) e^{-Omega~^2 / 2 sigma~^2} sin^2(theta/2 + (1 + Omega~) phi/2)`.
///
/// Each integral is evaluated at two tolerances; a disagreement above `1e-8`
/// relative is reported as non-convergence.
pub fn quadrature_moments(
    pulse: &PulseParams,
    sel: &SelectionParams,
    domain: IntegrationDomain,
) -> Result<QuadratureMoments> {
    let st = pulse.sigma_tilde();
    let theta = sel.theta();
    let phi = sel.phi(pulse);
    let n0 = pulse.photon_number();
    let a = 0.5 * (theta + phi);
    let b = 0.5 * phi;
    let envelope = move |x: f64| (-0.5 * (x / st).powi(2)).exp() / ((2.0 * PI).sqrt() * st);
    let spectrum = move |x: f64| envelope(x) * (a + b * x).sin().powi(2);

    let run = |tol: f64| -> Result<(f64, f64, f64)> {
        match domain {
            IntegrationDomain::Extended => {
                // fold onto x >= 0: even part for N and the second moment,
                // sin^2(a + bx) - sin^2(a - bx) = sin(2a) sin(2bx) for the first
                let even = |x: f64| envelope(x) * ((a + b * x).sin().powi(2) + (a - b * x).sin().powi(2));
                let odd = |x: f64| envelope(x) * (2.0 * a).sin() * (2.0 * b * x).sin();
                let n = integrate(even, Domain::UpperHalf(0.0), tol, 0.0)?.value;
                let m1 = integrate(|x| x * odd(x), Domain::UpperHalf(0.0), tol, 0.0)?.value;
                let m2 = integrate(|x| x * x * even(x), Domain::UpperHalf(0.0), tol, 0.0)?.value;
                Ok((n, m1, m2))
            }
            IntegrationDomain::Physical => {
                let n = integrate(spectrum, Domain::UpperHalf(-1.0), tol, 0.0)?.value;
                let m1 = integrate(|x| x * spectrum(x), Domain::UpperHalf(-1.0), tol, 0.0)?.value;
                let m2 = integrate(|x| x * x * spectrum(x), Domain::UpperHalf(-1.0), tol, 0.0)?.value;
                Ok((n, m1, m2))
            }
        }
    };

    let coarse = run(COARSE_TOL)?;
    let fine = run(FINE_TOL)?;
    let scale = fine.2.abs().max(fine.1.abs());
    for (c, f, s) in [
        (coarse.0, fine.0, fine.0.abs()),
        (coarse.1, fine.1, scale),
        (coarse.2, fine.2, fine.2.abs()),
    ] {
        if (c - f).abs() > AGREEMENT * s {
            return Err(Error::QuadratureNonConvergence {
                previous: c,
                current: f,
            });
        }
    }
    let (n, m1, m2) = fine;
    if !(n > 0.0) {
        return Err(Error::PostSelectionSingular { theta });
    }
    Ok(QuadratureMoments {
        n: n0 * n,
        mean: m1 / n,
        second: m2 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiducial;
    use crate::heisenberg::{mean_frequency_shift, second_frequency_moment, total_output_photons, PhotonCount};

    #[test]
    fn gaussian_examples() {
        let g = gaussian_integral_check(1.0, 0.0, 0.0).unwrap();
        assert!((g.quadrature_cos - PI.sqrt()).abs() < 1e-12);
        assert!((g.analytic_cos - 1.772_453_9).abs() < 1e-7);
        let g = gaussian_integral_check(1.0, 0.0, PI / 2.0).unwrap();
        assert!(g.quadrature_cos.abs() < 1e-12);
        assert!((g.quadrature_sin - PI.sqrt()).abs() < 1e-12);
        let g = gaussian_integral_check(2.0, 1.0, 0.3).unwrap();
        assert!((g.quadrature_cos / g.analytic_cos - 1.0).abs() < 1e-10);
        assert!((g.quadrature_sin / g.analytic_sin - 1.0).abs() < 1e-10);
        assert!(gaussian_integral_check(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn extended_matches_closed_forms_at_figure_params() {
        let pulse = fiducial::si_pulse();
        let sel = fiducial::figure_selection();
        let q = quadrature_moments(&pulse, &sel, IntegrationDomain::Extended).unwrap();
        let n = total_output_photons(&pulse, &sel, PhotonCount::Exact);
        let m1 = mean_frequency_shift(&pulse, &sel).unwrap();
        let m2 = second_frequency_moment(&pulse, &sel).unwrap();
        assert!((q.n / n - 1.0).abs() < 1e-8, "{} {}", q.n, n);
        assert!((q.mean / m1 - 1.0).abs() < 1e-8, "{} {}", q.mean, m1);
        assert!((q.second / m2 - 1.0).abs() < 1e-8, "{} {}", q.second, m2);
    }

    #[test]
    fn bright_fringe_keeps_every_photon() {
        let pulse = fiducial::si_pulse();
        let sel = SelectionParams::new(PI, 0.0).unwrap();
        let q = quadrature_moments(&pulse, &sel, IntegrationDomain::Extended).unwrap();
        assert!((q.n / pulse.photon_number() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn physical_domain_loses_only_the_tail() {
        let pulse = fiducial::si_pulse();
        let sel = fiducial::figure_selection();
        let ext = quadrature_moments(&pulse, &sel, IntegrationDomain::Extended).unwrap();
        let phys = quadrature_moments(&pulse, &sel, IntegrationDomain::Physical).unwrap();
        let st = pulse.sigma_tilde();
        let gap = (ext.n - phys.n).abs() / ext.n;
        assert!(gap > 0.0);
        assert!(gap < 10.0 * (-1.0 / (2.0 * st * st)).exp(), "{gap}");
    }
}
