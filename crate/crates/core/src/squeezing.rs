//! Squeezed vacuum injected at the dark port.
//!
//! The mean signal is unchanged by squeezing; only the two noise terms are
//! rescaled. The earlier pulse (epoch 1) sets the radiation-pressure kick and
//! the measured pulse (epoch 2) sets the shot noise. Squeezing factors and
//! angles are constant across the pulse spectrum.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{output_fraction, second_moment, PhotonCount};
use crate::noise::{budget, sql_variance, NoiseBudget};
use crate::numeric::one_minus_damped_cos;
use crate::params::{derive_coupling, PulseParams, SelectionParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezeParams {
    pub r_s1: f64,
    pub phi_s1: f64,
    pub r_s2: f64,
    pub phi_s2: f64,
}

fn reduce_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl SqueezeParams {
    /// Angles are reduced into `[0, 2 pi)`.
    pub fn new(r_s1: f64, phi_s1: f64, r_s2: f64, phi_s2: f64) -> Result<Self> {
        for (name, r) in [("r_s1", r_s1), ("r_s2", r_s2)] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {r}")));
            }
        }
        for (name, a) in [("phi_s1", phi_s1), ("phi_s2", phi_s2)] {
            if !a.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(Self {
            r_s1,
            phi_s1: reduce_angle(phi_s1),
            r_s2,
            phi_s2: reduce_angle(phi_s2),
        })
    }

    /// Same factor `r` in both epochs.
    pub fn uniform(r: f64, phi_s1: f64, phi_s2: f64) -> Result<Self> {
        Self::new(r, phi_s1, r, phi_s2)
    }

    pub fn coherent() -> Self {
        Self {
            r_s1: 0.0,
            phi_s1: 0.0,
            r_s2: 0.0,
            phi_s2: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `f_pm = 2 sinh r (sinh r pm cos(phi_s) cosh r)`
pub fn f_pm(sign: Sign, r: f64, phi_s: f64) -> f64 {
    let c = match sign {
        Sign::Plus => phi_s.cos(),
        Sign::Minus => -phi_s.cos(),
    };
    2.0 * r.sinh() * (r.sinh() + c * r.cosh())
}

/// Leading-order shot-noise modification `F_+ = f_+ cos^2(theta/2)`.
pub fn big_f_plus(r: f64, phi_s: f64, theta: f64) -> f64 {
    f_pm(Sign::Plus, r, phi_s) * (0.5 * theta).cos().powi(2)
}

/// `F_+` before the small-phi expansion:
///
/// ```text
/// F_+ = sigma~^2 N0 f_+ / (8 N <Omega~^2>)
///       * {1 - e^{-2 phi^2 sigma~^2} (1 - 4 phi^2 sigma~^2) cos[2(phi + theta)]}
/// ```
///
/// with the exact `N` and `<Omega~^2>`.
pub fn big_f_plus_exact(r: f64, phi_s: f64, sigma_tilde: f64, theta: f64, phi: f64) -> Result<f64> {
    let st2 = sigma_tilde * sigma_tilde;
    if phi == 0.0 {
        return Ok(big_f_plus(r, phi_s, theta));
    }
    let s = 0.5 * st2 * phi * phi;
    let n_frac = output_fraction(s, theta, phi, PhotonCount::Exact);
    let moment = second_moment(s, theta, phi)?;
    let q = 2.0 * phi * phi * st2;
    let a2 = 2.0 * (phi + theta);
    let bracket = one_minus_damped_cos(q, a2) + 2.0 * q * (-q).exp() * a2.cos();
    Ok(st2 * f_pm(Sign::Plus, r, phi_s) * bracket / (8.0 * n_frac * moment))
}

/// Squeezed budget: `(SQL/2) [(1 + F_+(r2, phi2)) / I + I (1 + f_-(r1, phi1))]`.
pub fn squeezed_variance(
    pulse: &PulseParams,
    sel: &SelectionParams,
    sq: &SqueezeParams,
) -> Result<NoiseBudget> {
    let shot_factor = 1.0 + big_f_plus(sq.r_s2, sq.phi_s2, sel.theta());
    let rp_factor = 1.0 + f_pm(Sign::Minus, sq.r_s1, sq.phi_s1);
    budget(pulse, sel, PhotonCount::Approx, shot_factor, rp_factor)
}

/// `R_s^2`: squeezed total over the coherent SQL variance.
pub fn noise_ratio(pulse: &PulseParams, sel: &SelectionParams, sq: &SqueezeParams) -> Result<f64> {
    Ok(squeezed_variance(pulse, sel, sq)?.sql_ratio())
}

/// `R_s^2(I)` in the small-theta limit (`F_+ -> f_+`), the form plotted against `I`.
pub fn ratio_curve(intensity: f64, sq: &SqueezeParams) -> f64 {
    let shot = 1.0 + f_pm(Sign::Plus, sq.r_s2, sq.phi_s2);
    let rp = 1.0 + f_pm(Sign::Minus, sq.r_s1, sq.phi_s1);
    0.5 * (shot / intensity + intensity * rp)
}

/// Minimum over `I` of `R_s^2` at fixed `theta`: `sqrt((1 + F_+)(1 + f_-))`,
/// reached at `I = sqrt((1 + F_+)/(1 + f_-))`.
pub fn minimum_over_intensity(sq: &SqueezeParams, theta: f64) -> (f64, f64) {
    let shot = 1.0 + big_f_plus(sq.r_s2, sq.phi_s2, theta);
    let rp = 1.0 + f_pm(Sign::Minus, sq.r_s1, sq.phi_s1);
    ((shot / rp).sqrt(), (shot * rp).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleOptimum {
    pub phi_s1: f64,
    pub phi_s2: f64,
    pub intensity: f64,
    pub rs2_min: f64,
    /// Smallest `min_I R_s^2` found on the angle grid.
    pub sweep_min: f64,
    pub sweep_phi_s1: f64,
    pub sweep_phi_s2: f64,
}

pub const ANGLE_GRID: usize = 128;

/// Best squeezing angles for a factor `r` used in both epochs.
///
/// The optimum is analytic, `(phi_s1, phi_s2) = (0, pi)`; a sweep over a
/// 128 x 128 grid of the angle torus is returned alongside it.
pub fn optimize_angles(pulse: &PulseParams, sel: &SelectionParams, r: f64) -> Result<AngleOptimum> {
    let theta = sel.theta();
    // validates theta and the weak regime for the pulse
    squeezed_variance(pulse, sel, &SqueezeParams::uniform(r, 0.0, PI)?)?;
    let best = SqueezeParams::uniform(r, 0.0, PI)?;
    let (intensity, rs2_min) = minimum_over_intensity(&best, theta);
    let (sweep_min, sweep_phi_s1, sweep_phi_s2) = angle_sweep(r, theta, ANGLE_GRID);
    Ok(AngleOptimum {
        phi_s1: 0.0,
        phi_s2: PI,
        intensity,
        rs2_min,
        sweep_min,
        sweep_phi_s1,
        sweep_phi_s2,
    })
}

/// `(min, phi_s1, phi_s2)` of `min_I R_s^2` over an `n x n` grid of angles in `[0, 2 pi)`.
pub fn angle_sweep(r: f64, theta: f64, n: usize) -> (f64, f64, f64) {
    let step = TAU / n as f64;
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b) = ((k / n) as f64 * step, (k % n) as f64 * step);
            let sq = SqueezeParams {
                r_s1: r,
                phi_s1: a,
                r_s2: r,
                phi_s2: b,
            };
            (minimum_over_intensity(&sq, theta).1, a, b)
        })
        .reduce(
            || (f64::INFINITY, 0.0, 0.0),
            |x, y| {
                // ties resolved towards the lexicographically first cell
                if y.0 < x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                    y
                } else {
                    x
                }
            },
        )
}

/// Reference squeezing configurations plotted against `I`: coherent vacuum, then
/// factor `r` with angle pairs `(0, 0)`, `(pi, pi)` and `(0, pi)`.
pub fn figure_configs(r: f64) -> Result<Vec<(&'static str, SqueezeParams)>> {
    Ok(vec![
        ("coherent", SqueezeParams::coherent()),
        ("angles_0_0", SqueezeParams::uniform(r, 0.0, 0.0)?),
        ("angles_pi_pi", SqueezeParams::uniform(r, PI, PI)?),
        ("angles_0_pi", SqueezeParams::uniform(r, 0.0, PI)?),
    ])
}

/// Coupling phase for the exact `F_+` of a parameter set.
pub fn big_f_plus_exact_for(
    pulse: &PulseParams,
    sel: &SelectionParams,
    r: f64,
    phi_s: f64,
) -> Result<f64> {
    let c = derive_coupling(sel, pulse);
    big_f_plus_exact(r, phi_s, pulse.sigma_tilde(), sel.theta(), c.phi)
}

/// Coherent SQL variance, re-exported here for ratio bookkeeping.
pub fn sql_reference(pulse: &PulseParams, theta: f64) -> f64 {
    sql_variance(pulse, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiducial;
    use crate::noise::{pulse_for_intensity, total_variance};

    const E2: f64 = 7.389_056_098_930_65;

    #[test]
    fn f_special_angles() {
        for r in [0.2, 1.0, 1.7] {
            assert!((1.0 + f_pm(Sign::Plus, r, 0.0) - (2.0 * r).exp()).abs() < 1e-12 * (2.0 * r).exp());
            assert!((1.0 + f_pm(Sign::Minus, r, 0.0) - (-2.0 * r).exp()).abs() < 1e-12);
            assert!((1.0 + f_pm(Sign::Plus, r, PI) - (-2.0 * r).exp()).abs() < 1e-12);
            assert!((1.0 + f_pm(Sign::Minus, r, PI) - (2.0 * r).exp()).abs() < 1e-12 * (2.0 * r).exp());
        }
        assert_eq!(f_pm(Sign::Plus, 0.0, 1.3), 0.0);
        assert_eq!(f_pm(Sign::Minus, 0.0, 1.3), 0.0);
    }

    #[test]
    fn big_f_examples() {
        assert!(big_f_plus(1.0, 0.3, PI).abs() < 1e-16);
        assert!((big_f_plus(1.0, 0.0, 1e-9) - (E2 - 1.0)).abs() < 1e-12);
        assert!((big_f_plus(1.0, 0.0, 1e-9) - 6.389).abs() < 1e-3);
    }

    #[test]
    fn exact_f_reduces_to_leading_order() {
        let lead = big_f_plus(1.0, 0.4, 1e-3);
        let exact = big_f_plus_exact(1.0, 0.4, 1.0, 1e-3, 1e-4).unwrap();
        assert!((exact / lead - 1.0).abs() < 1e-6, "{}", exact / lead - 1.0);
        // the gap is first order in phi away from small theta
        let gap = |phi: f64| (big_f_plus_exact(1.0, 0.4, 1.0, 1.0, phi).unwrap() / big_f_plus(1.0, 0.4, 1.0) - 1.0).abs();
        assert!(gap(1e-6) < gap(1e-4) / 50.0);
    }

    #[test]
    fn no_squeezing_reproduces_coherent_budget_exactly() {
        let pulse = fiducial::si_pulse();
        let sel = fiducial::noise_selection();
        let a = squeezed_variance(&pulse, &sel, &SqueezeParams::coherent()).unwrap();
        let b = total_variance(&pulse, &sel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ratio_examples_at_unit_intensity() {
        let sel = fiducial::noise_selection();
        let pulse = pulse_for_intensity(&fiducial::si_pulse(), sel.theta(), 1.0).unwrap();
        let cosh2 = (2.0f64).cosh();
        let r00 = noise_ratio(&pulse, &sel, &SqueezeParams::uniform(1.0, 0.0, 0.0).unwrap()).unwrap();
        let rpp = noise_ratio(&pulse, &sel, &SqueezeParams::uniform(1.0, PI, PI).unwrap()).unwrap();
        let r0p = noise_ratio(&pulse, &sel, &SqueezeParams::uniform(1.0, 0.0, PI).unwrap()).unwrap();
        assert!((r00 / cosh2 - 1.0).abs() < 1e-6);
        assert!((rpp / cosh2 - 1.0).abs() < 1e-6);
        assert!((r0p * E2 - 1.0).abs() < 1e-6);
        assert!((cosh2 - 3.762).abs() < 1e-3);
    }

    #[test]
    fn curve_minima() {
        let r = 1.0;
        let grid = crate::numeric::log_space(1e-3, 1e3, 6001);
        let min_of = |sq: &SqueezeParams| {
            grid.iter()
                .map(|&i| (i, ratio_curve(i, sq)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
        };
        let (i00, _) = min_of(&SqueezeParams::uniform(r, 0.0, 0.0).unwrap());
        assert!((i00 / E2 - 1.0).abs() < 3e-3);
        let (ipp, vpp) = min_of(&SqueezeParams::uniform(r, PI, PI).unwrap());
        assert!((ipp * E2 - 1.0).abs() < 3e-3);
        assert!((vpp - 1.0).abs() < 1e-5);
        let (i0p, v0p) = min_of(&SqueezeParams::uniform(r, 0.0, PI).unwrap());
        assert!((i0p - 1.0).abs() < 3e-3);
        assert!((v0p * E2 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn angles_are_periodic() {
        let a = SqueezeParams::uniform(0.7, 0.3, 2.0).unwrap();
        let b = SqueezeParams::uniform(0.7, 0.3 + TAU, 2.0 + TAU).unwrap();
        for i in [0.1, 1.0, 7.0] {
            assert!((ratio_curve(i, &a) - ratio_curve(i, &b)).abs() < 1e-12);
        }
    }

    #[test]
    fn optimum_examples() {
        let pulse = fiducial::si_pulse();
        let sel = fiducial::noise_selection();
        let o = optimize_angles(&pulse, &sel, 1.0).unwrap();
        assert_eq!((o.phi_s1, o.phi_s2), (0.0, PI));
        assert!((o.intensity - 1.0).abs() < 1e-5);
        assert!((o.rs2_min - 0.1353).abs() < 1e-4);
        assert!((o.sweep_min - o.rs2_min).abs() < 1e-12);
        assert!(o.sweep_phi_s1.abs() < 1e-12 && (o.sweep_phi_s2 - PI).abs() < 1e-12);

        let o = optimize_angles(&pulse, &sel, 0.0).unwrap();
        assert!((o.rs2_min - 1.0).abs() < 1e-15 && (o.intensity - 1.0).abs() < 1e-15);

        let o = optimize_angles(&pulse, &sel, 0.5).unwrap();
        assert!((o.rs2_min - (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn rejects_negative_squeezing() {
        assert!(SqueezeParams::new(-0.1, 0.0, 0.0, 0.0).is_err());
        let s = SqueezeParams::new(0.1, -PI, 0.0, 3.0 * PI).unwrap();
        assert!((s.phi_s1 - PI).abs() < 1e-15 && (s.phi_s2 - PI).abs() < 1e-15);
    }
}
