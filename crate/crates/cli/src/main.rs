use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use phasekin::harness::Experiment;
use phasekin::profiles::{cross_validate, ProfileOperator, ProfileSet};
use phasekin::simulator::{self, free_energy, track_interface};
use phasekin::transmission::bar_interface_data;
use phasekin::{effort_report, run_sweep, Config, Geometry};

#[derive(Parser)]
#[command(name = "phasekin", version, about = "Allen-Cahn kinetic relations: profiles, asymptotics, simulation")]
struct Cli {
    /// TOML configuration file; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve S0, S1, S2 for the configured bar and write them as CSV.
    Profiles,
    /// Kinetic coefficients, closed form against solvability multipliers.
    Kinetics,
    /// Time-integrate the phase-field model.
    Simulate,
    /// Run the configured parameter sweep.
    Sweep,
    /// Residuals of the composite asymptotic field over the sweep values.
    Residuals,
    /// Numerical-effort bounds for a target model error.
    Effort,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    match cli.command {
        Command::Profiles => profiles(&config, &cli.out),
        Command::Kinetics => kinetics(&config, &cli.out),
        Command::Simulate => simulate(&config, &cli.out),
        Command::Sweep => sweep(&config, &cli.out, cli.jobs, None),
        Command::Residuals => sweep(&config, &cli.out, cli.jobs, Some(Experiment::Residuals)),
        Command::Effort => effort(&config, &cli.out),
    }
}

fn write_summary(out: &Path, value: &serde_json::Value) -> Result<()> {
    let path = out.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(value)?).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn csv_writer(out: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    let path = out.join(name);
    csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))
}

fn profiles(config: &Config, out: &Path) -> Result<()> {
    let psi = config.potential()?;
    let bar = config.bar()?;
    let grid = config.grid(&psi)?;
    let (_, _, data) = bar_interface_data(&bar, &psi)?;
    let set = ProfileSet::solve(&psi, &data, &grid, config.model.lambda, config.model.mobility)?;
    let mut w = csv_writer(out, "profiles.csv")?;
    w.write_record(["zeta", "S0", "S1", "S2", "rho1", "rho2"])?;
    for (i, z) in grid.zeta().iter().enumerate() {
        let row = [*z, set.s0.values[i], set.s1.values[i], set.s2.values[i], set.rho1[i], set.rho2[i]];
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    let k = &set.coeffs;
    write_summary(
        out,
        &json!({
            "c1": set.c1,
            "a": set.decay_rate,
            "s00": k.s00, "s01": k.s01, "s10": k.s10, "s11": k.s11, "s12": k.s12,
            "defect_f1": set.defects.f1,
            "defect_f2": set.defects.f2,
            "tail_error_s0": set.s0.tail_error(),
            "grid_points": grid.len(),
            "half_length": grid.half_length(),
        }),
    )
}

fn kinetics(config: &Config, out: &Path) -> Result<()> {
    let psi = config.potential()?;
    let bar = config.bar()?;
    let grid = config.grid(&psi)?;
    let (lambda, mu, c) = (config.model.lambda, config.model.mu, config.model.mobility);
    let (_, _, data) = bar_interface_data(&bar, &psi)?;
    let set = ProfileSet::solve(&psi, &data, &grid, lambda, c)?;
    let ((c0, c1), (m0, m1)) = cross_validate(&psi, &data, &grid, lambda, c)?;
    let op = ProfileOperator::new(&psi, &set.s0)?;
    let k = &set.coeffs;
    write_summary(
        out,
        &json!({
            "mu": mu,
            "lambda": lambda,
            "s00": k.s00, "s01": k.s01, "s10": k.s10, "s11": k.s11, "s12": k.s12,
            "s0": k.s0(lambda),
            "s1": k.s1(lambda),
            "s": k.s(mu, lambda),
            "multiplier_s0": m0,
            "multiplier_s1": m1,
            "closed_form_s0": c0,
            "closed_form_s1": c1,
            "kernel_eigenvalue": op.kernel_eigenvalue(),
            "interface_data": {
                "eps_t_plus": data.eps_t_plus,
                "eps_t_minus": data.eps_t_minus,
                "sigma_hat_prime0": data.sigma_hat_prime0,
                "sigma_check0": data.sigma_check0,
                "u_star": data.u_star,
                "grad_term": data.grad_term,
            },
        }),
    )
}

fn simulate(config: &Config, out: &Path) -> Result<()> {
    let sim = config.sim_config()?;
    let state = match sim.geometry {
        Geometry::Planar1d => simulator::init_traveling(&sim)?,
        _ => simulator::init_radial(&sim)?,
    };
    let e0 = free_energy(&state, &sim);
    let mut series = csv_writer(out, "timeseries.csv")?;
    series.write_record(["t", "interface_position", "speed", "energy"])?;
    let first = track_interface(&state, &sim)?;
    series.write_record([0.0, first.position, f64::NAN, e0].iter().map(|v| v.to_string()))?;
    let mut failure = None;
    let mut prev = e0;
    let mut worst_increase: f64 = 0.0;
    let last = simulator::run(&sim, state, |st| {
        let e = free_energy(st, &sim);
        worst_increase = worst_increase.max((e - prev) / prev.abs().max(f64::MIN_POSITIVE));
        prev = e;
        if st.steps % sim.output_every != 0 || failure.is_some() {
            return;
        }
        match track_interface(st, &sim) {
            Ok(tr) => {
                let row = [st.t, tr.position, tr.speed.unwrap_or(f64::NAN), e];
                if let Err(err) = series.write_record(row.iter().map(|v| v.to_string())) {
                    failure = Some(anyhow::Error::from(err));
                }
            }
            Err(err) => failure = Some(err.into()),
        }
    })?;
    series.flush()?;
    if let Some(err) = failure {
        return Err(err);
    }
    let mut field = csv_writer(out, "field.csv")?;
    field.write_record(["x", "S", "u", "T"])?;
    for (i, x) in sim.centres().iter().enumerate() {
        let u = if last.u.is_empty() { 0.0 } else { 0.5 * (last.u[i] + last.u[i + 1]) };
        let t = last.stress.get(i).copied().unwrap_or(0.0);
        field.write_record([*x, last.s[i], u, t].iter().map(|v| v.to_string()))?;
    }
    field.flush()?;
    let tr = track_interface(&last, &sim)?;
    write_summary(
        out,
        &json!({
            "geometry": sim.geometry,
            "cells": sim.cells,
            "dt": sim.time_step(),
            "steps": last.steps,
            "t_end": last.t,
            "interface_position": tr.position,
            "speed": tr.speed,
            "energy_initial": e0,
            "energy_final": free_energy(&last, &sim),
            "max_relative_energy_increase": worst_increase,
            "max_overshoot": last.max_overshoot(),
        }),
    )
}

fn sweep(config: &Config, out: &Path, jobs: Option<usize>, experiment: Option<Experiment>) -> Result<()> {
    let mut config = config.clone();
    if let Some(e) = experiment {
        config.sweep.experiment = e;
    }
    let spec = config.sweep_spec(Some(out.to_path_buf()), jobs)?;
    let report = run_sweep(&spec)?;
    for f in &report.fits {
        println!("{} vs {} (fixed {}): slope {:.4}", f.column, f.against, f.fixed, f.fit.slope);
    }
    for (c, f) in &report.joint_fits {
        println!("{c}: joint exponents mu {:.4}, lambda {:.4}", f.exponent_mu, f.exponent_lambda);
    }
    if let Some(ok) = report.certified {
        println!("grid certificate: {}", if ok { "passed" } else { "FAILED" });
    }
    for s in &report.skipped {
        println!("skipped: {s}");
    }
    println!("wrote {}", out.join(format!("{}.csv", report.experiment.name())).display());
    Ok(())
}

fn effort(config: &Config, out: &Path) -> Result<()> {
    let e = &config.effort;
    let r = effort_report(e.target_error, e.curvature_norm, e.s10_norm, config.model.mobility, e.p)?;
    write_summary(out, &serde_json::to_value(r)?)
}
