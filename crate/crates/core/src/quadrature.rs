//! Numerical integration: Gauss–Hermite rules for Gaussian-weighted
//! expectations and a globally adaptive Gauss–Kronrod integrator.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use crate::error::{Error, Result};

/// Gauss–Hermite rule used for Gaussian-weighted expectations.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    rule: gauss_quad::GaussHermite,
    n: usize,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        let deg = NonZeroUsize::new(n).expect("Gauss-Hermite rule needs at least one node");
        Self {
            rule: gauss_quad::GaussHermite::new(deg),
            n,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `E[f(X)]` for a standard normal `X`.
    pub fn expect_normal<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let scale = std::f64::consts::SQRT_2;
        self.rule.integrate(|x| f(scale * x)) / PI.sqrt()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[a, +inf)`
    UpperHalf(f64),
    /// `(-inf, +inf)`
    Real,
}

const MAX_INTERVALS: usize = 4000;

/// Globally adaptive Gauss–Kronrod integration: the interval with the largest
/// error estimate is bisected until the summed estimate drops below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, domain: Domain, rel_tol: f64, abs_tol: f64) -> Result<Integral> {
    match domain {
        Domain::Finite(a, b) => adapt(&f, a, b, rel_tol, abs_tol),
        Domain::Real => {
            // x = t / (1 - t^2)
            let g = |t: f64| {
                let d = 1.0 - t * t;
                f(t / d) * (1.0 + t * t) / (d * d)
            };
            adapt(&g, -1.0, 1.0, rel_tol, abs_tol)
        }
        Domain::UpperHalf(a) => {
            // x = a + t / (1 - t)
            let g = |t: f64| {
                let d = 1.0 - t;
                f(a + t / d) / (d * d)
            };
            adapt(&g, 0.0, 1.0, rel_tol, abs_tol)
        }
    }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Integral> {
    let (v, e) = kronrod15(f, a, b);
    let mut parts: Vec<(f64, f64, f64, f64)> = vec![(a, b, v, e)];
    let mut value = v;
    let mut error = e;
    while error > abs_tol.max(rel_tol * value.abs()) {
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNonConvergence {
                previous: value - error,
                current: value,
            });
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("non-empty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (vl, el) = kronrod15(f, lo, mid);
        let (vr, er) = kronrod15(f, mid, hi);
        parts.push((lo, mid, vl, el));
        parts.push((mid, hi, vr, er));
        // resum to avoid drift from repeated add/subtract
        value = parts.iter().map(|p| p.2).sum();
        error = parts.iter().map(|p| p.3).sum();
    }
    Ok(Integral {
        value,
        error,
        intervals: parts.len(),
    })
}
