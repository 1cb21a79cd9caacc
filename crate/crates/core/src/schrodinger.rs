//! Pointer moments of the post-selected photon in the state-vector picture.
//!
//! Centered moments are reported as `(phi/2)^n <Omega~^n>'`, i.e. the pointer
//! shift measured in units of the coupling with `phi = +4 omega0 ell`. With
//! that sign convention the first moment is positive for `0 < theta + phi < pi`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::one_minus_damped_cos;
use crate::params::{weak_value, CouplingParams};
use crate::quadrature::GaussHermite;

/// First and second pointer moments, `g<w - w0>'` and `g^2<(w - w0)^2>'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointerMoments {
    pub first: f64,
    pub second: f64,
}

fn fringe_denominator(s: f64, theta: f64, phi: f64) -> Result<f64> {
    let d = one_minus_damped_cos(s, theta + phi);
    if d > 0.0 && d.is_finite() {
        Ok(d)
    } else {
        Err(Error::PostSelectionSingular { theta })
    }
}

fn check_strength(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("s", format!("must be finite and >= 0, got {s}")))
    }
}

/// `s e^{-s} sin(theta + phi) / (1 - e^{-s} cos(theta + phi))`
pub fn closed_first_moment(s: f64, theta: f64, phi: f64) -> Result<f64> {
    check_strength(s)?;
    let d = fringe_denominator(s, theta, phi)?;
    Ok(s * (-s).exp() * (theta + phi).sin() / d)
}

/// `(s/2) [1 + 2 s e^{-s} cos(theta + phi) / (1 - e^{-s} cos(theta + phi))]`
pub fn closed_second_moment(s: f64, theta: f64, phi: f64) -> Result<f64> {
    check_strength(s)?;
    let d = fringe_denominator(s, theta, phi)?;
    Ok(0.5 * s * (1.0 + 2.0 * s * (-s).exp() * (theta + phi).cos() / d))
}

pub fn closed_moments(s: f64, theta: f64, phi: f64) -> Result<PointerMoments> {
    Ok(PointerMoments {
        first: closed_first_moment(s, theta, phi)?,
        second: closed_second_moment(s, theta, phi)?,
    })
}

/// Which moment [`general_moment`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentKind {
    /// `(phi/2)^n <Omega~^n>'`, moments about the carrier in coupling units.
    Centered,
    /// `<(omega/omega0)^n>'`, raw moments in units of the carrier.
    Raw { sigma_tilde: f64 },
}

const START_NODES: usize = 64;
const MAX_NODES: usize = 1024;
const REFINE_TOL: f64 = 1e-10;
const SINGULAR_DENOMINATOR: f64 = 1e-30;

/// Post-selected moment of order `n` from the general weak-value expression
///
/// ```text
/// <h>' = (<h> + (|A_w|^2 - 1) <h sin^2 g w> + Im A_w <h sin 2 g w>)
///      / (1  + (|A_w|^2 - 1) <sin^2 g w>   + Im A_w <sin 2 g w>)
/// ```
///
/// with the averages taken over the initial Gaussian pointer by Gauss–Hermite
/// quadrature. The rule size starts at 64 nodes and doubles until two
/// successive estimates agree to `1e-10` relative.
pub fn general_moment(
    n: u32,
    coupling: &CouplingParams,
    theta: f64,
    kind: MomentKind,
) -> Result<f64> {
    check_strength(coupling.s)?;
    let aw = weak_value(theta)?.value();
    let amp = aw.norm_sqr() - 1.0;
    let im = aw.im;

    // g*omega = -phi/2 - kappa x with x the standardized frequency offset.
    let kappa = coupling.phi.signum() * (0.5 * coupling.s).sqrt();
    let half_phi = 0.5 * coupling.phi;
    let observable = |x: f64| -> f64 {
        match kind {
            MomentKind::Centered => (kappa * x).powi(n as i32),
            MomentKind::Raw { sigma_tilde } => (1.0 + sigma_tilde * x).powi(n as i32),
        }
    };
    let scale = match kind {
        MomentKind::Centered => kappa.abs().powi(n as i32),
        MomentKind::Raw { .. } => 1.0,
    };

    let evaluate = |rule: &GaussHermite| -> Result<f64> {
        let weighted = |h: &dyn Fn(f64) -> f64| {
            let base = rule.expect_normal(h);
            let sin2 = rule.expect_normal(|x| {
                let gw = -half_phi - kappa * x;
                let sn = gw.sin();
                h(x) * sn * sn
            });
            let sin_double = rule.expect_normal(|x| {
                let gw = -half_phi - kappa * x;
                h(x) * (2.0 * gw).sin()
            });
            base + amp * sin2 + im * sin_double
        };
        let den = weighted(&|_| 1.0);
        if den.abs() < SINGULAR_DENOMINATOR {
            return Err(Error::PostSelectionSingular { theta });
        }
        Ok(weighted(&observable) / den)
    };

    let mut nodes = START_NODES;
    let mut previous = evaluate(&GaussHermite::new(nodes))?;
    loop {
        nodes *= 2;
        let current = evaluate(&GaussHermite::new(nodes))?;
        let change = (current - previous).abs();
        if change <= REFINE_TOL * current.abs() || change <= 1e-15 * scale {
            return Ok(current);
        }
        if nodes >= MAX_NODES {
            return Err(Error::QuadratureNonConvergence { previous, current });
        }
        previous = current;
    }
}
