//! Pulse-by-pulse simulation of the post-selected frequency readout.
//!
//! Each pulse gets a Gaussian radiation-pressure time shift of the mirror,
//! which moves the displacement phase, and then independent photon counts in
//! every frequency bin around the shifted mean spectrum. The per-pulse
//! estimate is the count-weighted mean bin frequency.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{radiation_pressure_variance, total_variance};
use crate::params::{ParamSet, PulseParams, SelectionParams};
use crate::squeezing::{f_pm, squeezed_variance, Sign, SqueezeParams};

pub const DEFAULT_BINS: usize = 512;
/// Bins cover `[-8 sigma~, 8 sigma~]` unless a width is given.
pub const DEFAULT_HALF_WIDTH: f64 = 8.0;
/// Bin means below this are sampled by Poisson inversion, above it by a normal draw.
pub const POISSON_INVERSION_LIMIT: f64 = 30.0;
const MIN_PULSES: usize = 1000;
const MIN_BINS: usize = 64;
const JACKKNIFE_GROUPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub n_pulses: usize,
    pub seed: u64,
    pub bins: usize,
    /// Bin width in units of `omega0`; bins stay centred on the carrier.
    pub bin_width: Option<f64>,
    pub squeeze: Option<SqueezeParams>,
}

impl McConfig {
    pub fn new(n_pulses: usize, seed: u64) -> Self {
        Self {
            n_pulses,
            seed,
            bins: DEFAULT_BINS,
            bin_width: None,
            squeeze: None,
        }
    }

    pub fn with_squeeze(mut self, sq: SqueezeParams) -> Self {
        self.squeeze = Some(sq);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_pulses < MIN_PULSES {
            return Err(Error::invalid("n_pulses", format!("must be >= {MIN_PULSES}, got {}", self.n_pulses)));
        }
        if self.bins < MIN_BINS {
            return Err(Error::invalid("bins", format!("must be >= {MIN_BINS}, got {}", self.bins)));
        }
        if let Some(w) = self.bin_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid("bin_width", format!("must be > 0, got {w}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    /// Ensemble mean of the per-pulse `Omega~` estimate.
    pub mean_shift: f64,
    pub mean_std_error: f64,
    /// Ensemble variance of the per-pulse estimate.
    pub variance: f64,
    /// Jackknife standard error of `variance`.
    pub std_error: f64,
    /// Pulses with at least one detected photon.
    pub n_effective: usize,
    /// Pulses without a detected photon, left out of the estimates.
    pub n_excluded: usize,
    /// Mean detected photons per used pulse.
    pub mean_photons: f64,
}

impl McEstimate {
    pub fn exclusion_fraction(&self) -> f64 {
        self.n_excluded as f64 / (self.n_effective + self.n_excluded) as f64
    }
}

struct Bins {
    centres: Vec<f64>,
    /// Expected photons per bin before the fringe factor.
    weights: Vec<f64>,
}

fn bins(pulse: &PulseParams, cfg: &McConfig) -> Bins {
    let st = pulse.sigma_tilde();
    let h = cfg.bin_width.unwrap_or(2.0 * DEFAULT_HALF_WIDTH * st / cfg.bins as f64);
    let lo = -0.5 * h * cfg.bins as f64;
    let norm = pulse.photon_number() * h / ((2.0 * PI).sqrt() * st);
    let centres: Vec<f64> = (0..cfg.bins).map(|i| lo + (i as f64 + 0.5) * h).collect();
    let weights = centres
        .iter()
        .map(|&x| norm * (-0.5 * (x / st).powi(2)).exp())
        .collect();
    Bins { centres, weights }
}

fn poisson_inversion<R: Rng>(rng: &mut R, mean: f64) -> f64 {
    let u: f64 = rng.random();
    let mut p = (-mean).exp();
    let mut cdf = p;
    let mut k = 0u32;
    while u > cdf && p > 0.0 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
    }
    k as f64
}

/// `(sum n_i Omega~_i, sum n_i)` for one pulse.
fn simulate_pulse(
    rng: &mut ChaCha8Rng,
    b: &Bins,
    theta: f64,
    phi: f64,
    omega0: f64,
    xi_sd: f64,
    shot_f_plus: Option<f64>,
) -> (f64, f64) {
    let z: f64 = rng.sample(StandardNormal);
    let phi_eff = phi + 2.0 * omega0 * xi_sd * z;
    let mut weighted = 0.0;
    let mut total = 0.0;
    for (&x, &w) in b.centres.iter().zip(&b.weights) {
        let phase = 0.5 * theta + 0.5 * (1.0 + x) * phi_eff;
        let mean = w * phase.sin().powi(2);
        let n = match shot_f_plus {
            // squeezed quadrature fluctuations, linearized about the mean
            Some(f) => {
                let g: f64 = rng.sample(StandardNormal);
                mean + (mean * (1.0 + f * phase.cos().powi(2))).sqrt() * g
            }
            None if mean < POISSON_INVERSION_LIMIT => poisson_inversion(rng, mean),
            None => {
                let g: f64 = rng.sample(StandardNormal);
                (mean + mean.sqrt() * g).round().max(0.0)
            }
        };
        weighted += n * x;
        total += n;
    }
    (weighted, total)
}

/// Ensemble statistics of the per-pulse frequency estimate.
///
/// Pulse `k` draws from its own ChaCha8 stream `k` under the configured seed, so
/// results do not depend on the number of worker threads.
pub fn monte_carlo_ensemble(pulse: &PulseParams, sel: &SelectionParams, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    // weak-regime and post-selection checks
    match &cfg.squeeze {
        Some(sq) => squeezed_variance(pulse, sel, sq)?,
        None => total_variance(pulse, sel)?,
    };

    let b = bins(pulse, cfg);
    let theta = sel.theta();
    let phi = sel.phi(pulse);
    let omega0 = pulse.omega0();
    let (rp_factor, shot_f_plus) = match &cfg.squeeze {
        Some(sq) => (
            1.0 + f_pm(Sign::Minus, sq.r_s1, sq.phi_s1),
            Some(f_pm(Sign::Plus, sq.r_s2, sq.phi_s2)),
        ),
        None => (1.0, None),
    };
    let xi_sd = (rp_factor * radiation_pressure_variance(pulse)).sqrt();

    let per_pulse: Vec<Option<(f64, f64)>> = (0..cfg.n_pulses)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k as u64);
            let (w, n) = simulate_pulse(&mut rng, &b, theta, phi, omega0, xi_sd, shot_f_plus);
            (n > 0.0).then(|| (w / n, n))
        })
        .collect();

    let used: Vec<(f64, f64)> = per_pulse.iter().flatten().copied().collect();
    let n_excluded = cfg.n_pulses - used.len();
    if used.len() < 2 {
        return Err(Error::EmptyPostSelection { excluded: n_excluded });
    }
    if n_excluded > 0 {
        log::info!("{n_excluded} of {} pulses had no detected photons", cfg.n_pulses);
    }
    let values: Vec<f64> = used.iter().map(|u| u.0).collect();
    let mean_photons = used.iter().map(|u| u.1).sum::<f64>() / used.len() as f64;
    let (mean_shift, mean_std_error, variance, std_error) = jackknife(&values);
    Ok(McEstimate {
        mean_shift,
        mean_std_error,
        variance,
        std_error,
        n_effective: used.len(),
        n_excluded,
        mean_photons,
    })
}

/// Mean, its error, unbiased variance and the grouped-jackknife error of the variance.
fn jackknife(x: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let groups = JACKKNIFE_GROUPS.min(n);
    let mut sums = vec![(0.0f64, 0.0f64, 0usize); groups];
    for (i, &v) in x.iter().enumerate() {
        let g = &mut sums[i * groups / n];
        let d = v - mean;
        g.0 += d;
        g.1 += d * d;
        g.2 += 1;
    }
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |a, g| (a.0 + g.0, a.1 + g.1));
    let var = (s2 - s1 * s1 / n as f64) / (n as f64 - 1.0);
    let leave_out: Vec<(f64, f64)> = sums
        .iter()
        .map(|g| {
            let m = (n - g.2) as f64;
            let (a, q) = (s1 - g.0, s2 - g.1);
            (mean + a / m, (q - a * a / m) / (m - 1.0))
        })
        .collect();
    let gf = groups as f64;
    let spread = |sel: fn(&(f64, f64)) -> f64| {
        let avg = leave_out.iter().map(sel).sum::<f64>() / gf;
        ((gf - 1.0) / gf * leave_out.iter().map(|v| (sel(v) - avg).powi(2)).sum::<f64>()).sqrt()
    };
    (mean, spread(|v| v.0), var, spread(|v| v.1))
}

/// JSON record of one ensemble run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McManifest {
    pub config: McConfig,
    pub params: ParamSet,
    pub seed: u64,
    pub exclusion_fraction: f64,
    pub estimate: McEstimate,
    pub analytic_variance: f64,
    pub wall_time_s: f64,
}

impl McManifest {
    pub fn new(
        cfg: &McConfig,
        pulse: &PulseParams,
        sel: &SelectionParams,
        estimate: &McEstimate,
        analytic_variance: f64,
        wall_time_s: f64,
    ) -> Self {
        Self {
            config: *cfg,
            params: ParamSet::from_params(pulse, sel),
            seed: cfg.seed,
            exclusion_fraction: estimate.exclusion_fraction(),
            estimate: *estimate,
            analytic_variance,
            wall_time_s,
        }
    }
}
