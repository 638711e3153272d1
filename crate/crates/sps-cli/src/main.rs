//! `sps` — command-line front end for the single-photon-source emitter
//! simulator.
//!
//! Subcommands: `pulse` (envelope + spectrum CSV), `rates` (phonon-rate CSV),
//! `evolve` (deterministic populations), `fom` (full figures-of-merit run),
//! `sweep-gap`, `sweep-super`, `info` (phonon diagnostics).
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical fault.

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use config::RunConfig;
use sps_core::pulse::Preset;
use sps_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "sps", version, about = "Single-photon-source emitter simulator")]
struct Cli {
    /// Driving scheme preset: long-dichromatic, short-dichromatic, narp, super.
    /// Overrides any `preset` line in --config and resets pulse parameters.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Flat key=value config file (dotted keys, table units: meV, ps, K).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for all stochastic estimators.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of trajectories per stochastic estimator.
    #[arg(long, global = true)]
    ntraj: Option<usize>,
    /// Disable the phonon channels (lossless emitter apart from radiative decay).
    #[arg(long, global = true)]
    no_phonons: bool,
    /// Add the polaron shift to the effective laser detuning.
    #[arg(long, global = true)]
    polaron_shift: bool,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write the drive envelope and shaped power spectrum as CSV.
    Pulse,
    /// Write the drive-dependent phonon rates along the pulse as CSV.
    Rates,
    /// Integrate the master equation and write the population trace.
    Evolve,
    /// Full figures-of-merit run: deterministic oracle + trajectory estimators.
    Fom {
        /// Also write a per-trajectory jump log (traj_id,t_ps,channel).
        #[arg(long)]
        jump_log: bool,
    },
    /// Scan the spectral gap (dichromatic δ·t_p) or the NARP hole width.
    SweepGap {
        /// Number of scan points.
        #[arg(long, default_value_t = 7)]
        points: usize,
        /// Axis minimum (δ·t_p for dichromatic, hole-width factor for NARP).
        #[arg(long)]
        min: Option<f64>,
        /// Axis maximum.
        #[arg(long)]
        max: Option<f64>,
    },
    /// Scan SUPER robustness: Ω₂ ±30%, t_p,2 ±30%, or Δ₂ ±2%.
    SweepSuper {
        #[arg(long, value_enum)]
        axis: SuperAxis,
        #[arg(long, default_value_t = 7)]
        points: usize,
    },
    /// Report the Franck–Condon factor, indistinguishability cap, polaron
    /// shift, and pulse adiabaticity diagnostics.
    Info,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuperAxis {
    Omega2,
    Tp2,
    Delta2,
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, Error> {
    // Precedence: built-in preset defaults < config file < command-line flags.
    let mut cfg = RunConfig::from_preset(Preset::Super);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_file(&text, &path.display().to_string())?;
    } else if cli.preset.is_none() {
        return Err(Error::Config(
            "no scheme selected: pass --preset or --config".into(),
        ));
    }
    if let Some(p) = &cli.preset {
        cfg.apply("preset", p)?;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.ntraj {
        cfg.n_traj = n;
    }
    if cli.no_phonons {
        cfg.phonon = None;
    }
    if cli.polaron_shift {
        cfg.polaron_shift = true;
    }
    cfg.out_dir = cli.out_dir.clone();
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    // `info` with no scheme flags still reports the phonon quantities.
    let cfg = match (&cli.cmd, resolve_config(cli)) {
        (Cmd::Info, Err(Error::Config(_))) if cli.preset.is_none() && cli.config.is_none() => {
            let mut c = RunConfig::from_preset(Preset::Super);
            if cli.no_phonons {
                c.phonon = None;
            }
            c.out_dir = cli.out_dir.clone();
            c
        }
        (_, r) => r?,
    };
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", cfg.out_dir.display())))?;
    match &cli.cmd {
        Cmd::Pulse => commands::cmd_pulse(&cfg),
        Cmd::Rates => commands::cmd_rates(&cfg),
        Cmd::Evolve => commands::cmd_evolve(&cfg),
        Cmd::Fom { jump_log } => commands::cmd_fom(&cfg, *jump_log),
        Cmd::SweepGap { points, min, max } => commands::cmd_sweep_gap(&cfg, *points, *min, *max),
        Cmd::SweepSuper { axis, points } => commands::cmd_sweep_super(&cfg, *axis, *points),
        Cmd::Info => commands::cmd_info(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e @ Error::Numerical(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
