mod output;
mod params;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use wva_core::heisenberg::{photon_distribution, FrequencyGrid, GridMode, PhotonCount};
use wva_core::noise::{intensity_sweep, snr_from_budget, total_variance_with, BudgetOptions, NoiseReport};
use wva_core::numeric::log_space;
use wva_core::squeezing::{figure_configs, optimize_angles, ratio_curve, SqueezeParams};
use wva_core::verify::{self, VerifyOptions};
use wva_core::fiducial;

use output::{Format, Output, Table};
use params::{param_header, ParamArgs};

#[derive(Parser)]
#[command(name = "wva-sql", version, about = "Quantum-noise budget of weak-value-amplified position measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Output photon-number distributions.
    #[command(allow_negative_numbers = true)]
    Distribution {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Emit rho = omega0 n / (2 pi N) normalized on the grid.
        #[arg(long)]
        normalized: bool,
    },
    /// Shot, radiation-pressure and total noise with an intensity sweep.
    #[command(allow_negative_numbers = true)]
    Noise {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Intensity sweep `lo:hi[:n]`, log-spaced.
        #[arg(long = "I-sweep", value_name = "LO:HI[:N]", default_value = "0.01:100:201")]
        i_sweep: String,
        /// Also evaluate the budget with the exact output photon number.
        #[arg(long = "exact-N")]
        exact_n: bool,
    },
    /// Squeezed-vacuum noise ratio curves.
    #[command(allow_negative_numbers = true)]
    Squeeze {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Squeezing factor for both epochs.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Squeezing angle of the earlier pulse; adds a custom curve.
        #[arg(long)]
        phis1: Option<f64>,
        /// Squeezing angle of the measured pulse; adds a custom curve.
        #[arg(long)]
        phis2: Option<f64>,
        #[arg(long = "I-sweep", value_name = "LO:HI[:N]", default_value = "0.01:100:201")]
        i_sweep: String,
        /// Report the optimal angles and intensity.
        #[arg(long)]
        optimize: bool,
    },
    /// Run the self-check suite; exits nonzero on any failure.
    Verify {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = VerifyOptions::default().mc_pulses)]
        mc_pulses: usize,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
        /// Replace every tolerance with this value.
        #[arg(long)]
        strict: Option<f64>,
    },
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        bail!("--I-sweep expects lo:hi[:n], got `{spec}`");
    }
    let lo: f64 = parts[0].parse().with_context(|| format!("bad sweep start `{}`", parts[0]))?;
    let hi: f64 = parts[1].parse().with_context(|| format!("bad sweep end `{}`", parts[1]))?;
    let n: usize = match parts.get(2) {
        Some(p) => p.parse().with_context(|| format!("bad sweep count `{p}`"))?,
        None => 201,
    };
    if !(lo > 0.0 && hi > lo && n >= 2) {
        bail!("--I-sweep needs 0 < lo < hi and n >= 2, got `{spec}`");
    }
    Ok(log_space(lo, hi, n))
}

fn fmt_tag(v: f64) -> String {
    format!("{v:e}")
}

fn cmd_distribution(params: &ParamArgs, out: &OutputArgs, normalized: bool) -> Result<()> {
    let mut sink = Output::new(&out.out, out.format, "distribution")?;
    // (panel, theta, phi); the fiducial curve appears in both panels
    let curves: Vec<(&str, f64, Option<f64>)> = if params.selects_curve() {
        vec![("curve", 0.0, None)]
    } else {
        let t = fiducial::THETA;
        let p = fiducial::FIGURE_PHI;
        vec![
            ("vary_phi", t, Some(2e-4)),
            ("vary_phi", t, Some(1e-4)),
            ("vary_phi", t, Some(5e-5)),
            ("vary_theta", 2e-3, Some(p)),
            ("vary_theta", 1e-3, Some(p)),
            ("vary_theta", 5e-4, Some(p)),
        ]
    };
    let prefix = if normalized { "fig1b" } else { "fig1a" };
    for (panel, theta, phi) in curves {
        let (pulse, sel) = match phi {
            Some(phi) => params.with_curve(theta, phi).resolve_figure()?,
            None => params.resolve_figure()?,
        };
        let grid = FrequencyGrid::default_for(pulse.sigma_tilde(), GridMode::Physical);
        let mut dist = photon_distribution(&grid, &pulse, &sel);
        if normalized {
            dist = dist
                .normalized()
                .context("cannot normalize a distribution without photons")?;
        }
        let name = match phi {
            Some(phi) => format!("{prefix}_{panel}_theta{}_phi{}", fmt_tag(theta), fmt_tag(phi)),
            None => format!("{prefix}_{panel}"),
        };
        let header = param_header(&pulse, &sel);
        match out.format {
            Format::Csv => {
                sink.write_with(&format!("{name}.csv"), |w| dist.write_csv(w, &header))?;
            }
            Format::Json => {
                let rho = dist.rho();
                let rows = grid
                    .points()
                    .iter()
                    .zip(dist.values())
                    .zip(&rho)
                    .map(|((x, v), r)| vec![*x, *v, *r])
                    .collect();
                let mut header = header;
                header.push(("normalized".into(), dist.is_normalized().to_string()));
                let table = Table::new(header, &["omega_tilde", "n_bar_units_N0_over_omega0", "rho"], rows);
                sink.table(&name, &table)?;
            }
        }
    }
    sink.finish(json!({ "normalized": normalized, "grid_points": wva_core::heisenberg::DEFAULT_GRID_POINTS }))
}

fn cmd_noise(params: &ParamArgs, out: &OutputArgs, sweep: &str, exact_n: bool) -> Result<()> {
    let intensities = parse_sweep(sweep)?;
    let (pulse, sel) = params.resolve_noise()?;
    let mut sink = Output::new(&out.out, out.format, "noise")?;

    let budget = total_variance_with(&pulse, &sel, BudgetOptions::default())?;
    let snr = snr_from_budget(&pulse, &sel, &budget)?;
    let mut report = serde_json::to_value(NoiseReport::new(&pulse, &sel, &budget, &snr))?;
    report["expansion_residual"] = json!(budget.expansion_residual);
    if exact_n {
        let exact = total_variance_with(
            &pulse,
            &sel,
            BudgetOptions {
                photon_count: PhotonCount::Exact,
            },
        )?;
        report["exact_N"] = json!({
            "shot": exact.shot,
            "radiation_pressure": exact.radiation_pressure,
            "total": exact.total,
            "delta_relative": exact.total / budget.total - 1.0,
        });
        println!("exact-N total differs by {:+.3e} (relative)", exact.total / budget.total - 1.0);
    }
    sink.json("noise.json", &report)?;
    println!("ell_sql = {:.4e} m", snr.ell_sql);
    println!("ell_min = {:.4e} m", snr.ell_min);
    println!("I = {:.4}", budget.intensity_i);
    println!("total/SQL = {:.6}", budget.sql_ratio());

    let rows: Vec<Vec<f64>> = intensity_sweep(&pulse, &sel, &intensities)?
        .into_iter()
        .map(|(i, r)| vec![i, r])
        .collect();
    let best = rows
        .iter()
        .min_by(|a, b| a[1].total_cmp(&b[1]))
        .map(|r| (r[0], r[1]))
        .expect("sweep has at least two points");
    println!("sweep minimum total/SQL = {:.6} at I = {:.4}", best.1, best.0);
    let table = Table::new(param_header(&pulse, &sel), &["I", "total_over_sql"], rows);
    sink.table("noise_sweep", &table)?;
    sink.finish(json!({ "I_sweep": sweep, "exact_N": exact_n }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_squeeze(
    params: &ParamArgs,
    out: &OutputArgs,
    r: f64,
    phis1: Option<f64>,
    phis2: Option<f64>,
    sweep: &str,
    optimize: bool,
) -> Result<()> {
    let intensities = parse_sweep(sweep)?;
    let (pulse, sel) = params.resolve_noise()?;
    let mut sink = Output::new(&out.out, out.format, "squeeze")?;

    let mut configs = figure_configs(r)?;
    if phis1.is_some() || phis2.is_some() {
        configs.push(("custom", SqueezeParams::uniform(r, phis1.unwrap_or(0.0), phis2.unwrap_or(0.0))?));
    }
    for (label, sq) in &configs {
        let header = vec![
            ("r_s".to_string(), fmt_tag(sq.r_s1)),
            ("phi_s1".to_string(), fmt_tag(sq.phi_s1)),
            ("phi_s2".to_string(), fmt_tag(sq.phi_s2)),
        ];
        let rows = intensities.iter().map(|&i| vec![i, ratio_curve(i, sq)]).collect();
        sink.table(&format!("fig3_{label}"), &Table::new(header, &["I", "Rs2"], rows))?;
    }
    let mut extra = json!({ "r": r, "I_sweep": sweep });
    if optimize {
        let o = optimize_angles(&pulse, &sel, r)?;
        println!(
            "phi_s1 = {:.6}, phi_s2 = {:.6}, I = {:.6}, Rs2_min = {:.6}",
            o.phi_s1, o.phi_s2, o.intensity, o.rs2_min
        );
        println!(
            "grid sweep minimum {:.6} at ({:.6}, {:.6}); exp(-2r) = {:.6}",
            o.sweep_min,
            o.sweep_phi_s1,
            o.sweep_phi_s2,
            (-2.0 * r).exp()
        );
        sink.json("optimum.json", &o)?;
        extra["optimum"] = serde_json::to_value(o)?;
    }
    sink.finish(extra)
}

fn cmd_verify(out: &Path, mc_pulses: usize, seed: u64, strict: Option<f64>) -> Result<bool> {
    let mut sink = Output::new(out, Format::Json, "verify")?;
    let report = verify::run(VerifyOptions {
        seed,
        mc_pulses,
        strict,
    });
    for c in &report.checks {
        println!(
            "{} {:<28} {:.3e} (tolerance {:.1e})  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.deviation,
            c.tolerance,
            c.detail
        );
    }
    sink.json("verify.json", &report)?;
    sink.json("mc_manifest.json", &report.mc_runs)?;
    sink.finish(json!({ "seed": seed, "mc_pulses": mc_pulses, "strict": strict, "passed": report.passed }))?;
    Ok(report.passed)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("WVA_SQL_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("WVA_SQL_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match &cli.command {
        Command::Distribution {
            params,
            output,
            normalized,
        } => cmd_distribution(params, output, *normalized)?,
        Command::Noise {
            params,
            output,
            i_sweep,
            exact_n,
        } => cmd_noise(params, output, i_sweep, *exact_n)?,
        Command::Squeeze {
            params,
            output,
            r,
            phis1,
            phis2,
            i_sweep,
            optimize,
        } => cmd_squeeze(params, output, *r, *phis1, *phis2, i_sweep, *optimize)?,
        Command::Verify {
            out,
            mc_pulses,
            seed,
            strict,
        } => return cmd_verify(out, *mc_pulses, *seed, *strict),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_spec() {
        let s = parse_sweep("0.01:100").unwrap();
        assert_eq!(s.len(), 201);
        assert!((s[100] - 1.0).abs() < 1e-12);
        assert_eq!(parse_sweep("1:10:5").unwrap().len(), 5);
        assert!(parse_sweep("10:1").is_err());
        assert!(parse_sweep("0:1").is_err());
        assert!(parse_sweep("1").is_err());
    }
}
