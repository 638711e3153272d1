//! Subcommand implementations: artifact generation (CSV/JSON) plus concise
//! stdout summaries. Every command writes a `run_record.json` next to its
//! outputs so the exact run can be reproduced bit-identically.

use crate::config::{RunConfig, RunRecord};
use crate::SuperAxis;
use serde::Serialize;
use sps_core::drive::DriveModel;
use sps_core::hom::{
    distinguishable_baseline, indistinguishability_from_hom, run_hom_pair, HomConfig,
};
use sps_core::master::{evolve_me, hom_binary_oracle, photon_statistics};
use sps_core::phonon::{
    franck_condon, indistinguishability_cap, polaron_shift, rates_along_pulse, PhononRateTrace,
};
use sps_core::pulse::{build_setup, overlap_default, PulseSetup, SchemeParams};
use sps_core::stats::Estimate;
use sps_core::traj::{
    eta_from_counts, g2_from_counts, hbt_histogram, run_ensemble, EnsembleStats, TrajOptions,
    STREAM_TRAJ,
};
use sps_core::units::{radps_to_ghz, radps_to_mev};
use sps_core::{Error, Result};
use std::io::Write as _;
use std::path::Path;

/// Pulse, rates and frame shift resolved from a configuration.
pub struct Built {
    pub setup: PulseSetup,
    pub rates: Option<PhononRateTrace>,
    pub frame_shift: f64,
    pub gamma: f64,
}

impl Built {
    pub fn model(&self) -> DriveModel<'_> {
        let mut m = DriveModel::new(&self.setup.drive, self.rates.as_ref());
        m.frame_shift = self.frame_shift;
        m.gamma = self.gamma;
        m
    }
}

pub fn build(cfg: &RunConfig) -> Result<Built> {
    let setup = build_setup(&cfg.scheme)?;
    let rates = cfg
        .phonon
        .as_ref()
        .map(|ph| rates_along_pulse(&setup.drive, ph));
    // The polaron shift lowers the emitter frequency, reducing the effective
    // laser detuning ω_x − ω_L by Δ_P.
    let frame_shift = if cfg.polaron_shift {
        -polaron_shift(&cfg.phonon.unwrap_or_default())
    } else {
        0.0
    };
    Ok(Built {
        setup,
        rates,
        frame_shift,
        gamma: cfg.gamma,
    })
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("cannot write {}: {e}", path.display()))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| io_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize {}: {e}", path.display())))?;
    write_file(path, &text)
}

fn write_record(cfg: &RunConfig, command: &str) -> Result<()> {
    write_json(
        &cfg.out_dir.join("run_record.json"),
        &RunRecord::new(command, cfg),
    )
}

/// Row stride that keeps a CSV at or below `max_rows` rows.
fn stride_for(len: usize, max_rows: usize) -> usize {
    len.div_ceil(max_rows).max(1)
}

// ---------------------------------------------------------------------------
// pulse
// ---------------------------------------------------------------------------

pub fn cmd_pulse(cfg: &RunConfig) -> Result<()> {
    let built = build(cfg)?;
    let drive = &built.setup.drive;

    let mut csv = String::from("t_ps,re_env_mev,im_env_mev,abs_env_mev,nominal_detuning_mev\n");
    let stride = stride_for(drive.len(), 4096);
    for i in (0..drive.len()).step_by(stride) {
        let e = drive.env[i];
        csv.push_str(&format!(
            "{:.6},{:.9},{:.9},{:.9},{:.9}\n",
            drive.t(i),
            radps_to_mev(e.re),
            radps_to_mev(e.im),
            radps_to_mev(e.norm()),
            radps_to_mev(drive.nominal_detuning[i]),
        ));
    }
    write_file(&cfg.out_dir.join("pulse_envelope.csv"), &csv)?;

    let sd = built.setup.spectrum();
    let peak = sd.peak().max(f64::MIN_POSITIVE);
    let band = 30.0; // meV half-width kept in the spectrum CSV
    let kept: Vec<usize> = (0..sd.omega.len())
        .filter(|&i| radps_to_mev(sd.omega[i]).abs() <= band)
        .collect();
    let stride = stride_for(kept.len(), 8192);
    let mut csv = String::from("omega_mev,power\n");
    for &i in kept.iter().step_by(stride) {
        csv.push_str(&format!(
            "{:.6},{:.9e}\n",
            radps_to_mev(sd.omega[i]),
            sd.power[i] / peak
        ));
    }
    write_file(&cfg.out_dir.join("pulse_spectrum.csv"), &csv)?;
    write_record(cfg, "pulse")?;

    println!(
        "pulse {}: peak amplitude {:.4} meV, area {:.4} π, spectral overlap {:.4e}",
        cfg.preset.name(),
        radps_to_mev(drive.max_abs_env()),
        drive.integral_env().norm() / std::f64::consts::PI,
        overlap_default(&sd),
    );
    println!("wrote pulse_envelope.csv, pulse_spectrum.csv");
    Ok(())
}

// ---------------------------------------------------------------------------
// rates
// ---------------------------------------------------------------------------

pub fn cmd_rates(cfg: &RunConfig) -> Result<()> {
    if cfg.phonon.is_none() {
        return Err(Error::Config(
            "rates requires phonon channels (remove --no-phonons / set phonon.enabled = true)"
                .into(),
        ));
    }
    let built = build(cfg)?;
    let rates = built.rates.as_ref().expect("phonon config checked above");
    let drive = &built.setup.drive;

    let mut csv = String::from("t_ps,gamma_pd_ghz,gamma_up_ghz\n");
    let stride = stride_for(drive.len(), 4096);
    for i in (0..drive.len()).step_by(stride) {
        csv.push_str(&format!(
            "{:.6},{:.9e},{:.9e}\n",
            drive.t(i),
            radps_to_ghz(rates.gamma_pd[i]),
            radps_to_ghz(rates.gamma_up[i]),
        ));
    }
    write_file(&cfg.out_dir.join("phonon_rates.csv"), &csv)?;
    write_record(cfg, "rates")?;

    println!(
        "rates {}: peak dephasing {:.4e} GHz, peak excitation {:.4e} GHz",
        cfg.preset.name(),
        radps_to_ghz(rates.peak_pd()),
        radps_to_ghz(rates.peak_up()),
    );
    println!("wrote phonon_rates.csv");
    Ok(())
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

pub fn cmd_evolve(cfg: &RunConfig) -> Result<()> {
    let built = build(cfg)?;
    let model = built.model();
    let (t0, t1) = model.window();
    let n_steps = ((t1 - t0) / model.recommended_dt()).ceil() as usize;
    let me = evolve_me(&model, stride_for(n_steps, 4000))?;

    let mut csv = String::from("t_ps,nx\n");
    for (t, nx) in me.trace.t.iter().zip(me.trace.nx.iter()) {
        csv.push_str(&format!("{t:.6},{nx:.9}\n"));
    }
    write_file(&cfg.out_dir.join("population.csv"), &csv)?;
    write_record(cfg, "evolve")?;

    println!(
        "evolve {}: final N_x {:.6}, peak N_x {:.6}, mean photons {:.4}, trace drift {:.2e}",
        cfg.preset.name(),
        me.trace.nx.last().copied().unwrap_or(0.0),
        me.max_population,
        me.mean_photons,
        me.trace_drift,
    );
    println!("wrote population.csv");
    Ok(())
}

// ---------------------------------------------------------------------------
// fom
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct OracleFom {
    eta: f64,
    g2: f64,
    indist: f64,
    overlap: f64,
    mean_photons: f64,
    max_population: f64,
}

/// Stochastic estimator output (the stable machine-readable interface).
#[derive(Serialize)]
struct EstimatorFom {
    eta: f64,
    eta_se: f64,
    g2: f64,
    g2_se: f64,
    indist: f64,
    indist_se: f64,
    n_traj: usize,
    seed: u64,
}

#[derive(Serialize)]
struct FomJson {
    preset: &'static str,
    oracle: OracleFom,
    estimator: EstimatorFom,
    hbt_g2: f64,
    hbt_g2_se: f64,
}

/// Stochastic figures of merit for one configuration.
pub struct FomPoint {
    pub eta: Estimate,
    pub g2: Estimate,
    pub indist: Estimate,
    pub overlap: f64,
    pub ensemble: EnsembleStats,
}

/// Run the trajectory estimators (η, g², 𝓘) plus the spectral overlap for a
/// built pulse.
pub fn stochastic_fom(built: &Built, n_traj: usize, seed: u64) -> Result<FomPoint> {
    let model = built.model();
    let ensemble = run_ensemble(&model, n_traj, seed, STREAM_TRAJ, &TrajOptions::default())?;
    let eta = eta_from_counts(&ensemble);
    let g2 = g2_from_counts(&ensemble);
    let p_int = run_hom_pair(&model, &HomConfig::default(), n_traj, seed)?;
    let p_dist = distinguishable_baseline(&model, n_traj, seed)?;
    let indist = indistinguishability_from_hom(p_int, p_dist)?;
    let overlap = overlap_default(&built.setup.spectrum());
    Ok(FomPoint {
        eta,
        g2,
        indist,
        overlap,
        ensemble,
    })
}

pub fn cmd_fom(cfg: &RunConfig, jump_log: bool) -> Result<()> {
    let built = build(cfg)?;
    let model = built.model();

    let stats = photon_statistics(&model)?;
    let hom = hom_binary_oracle(&model)?;
    let point = stochastic_fom(&built, cfg.n_traj, cfg.seed)?;

    // HBT cross-check: fair-coin routing + consecutive-pulse coincidences.
    let window = 3.0 / model.gamma;
    let hbt = hbt_histogram(&point.ensemble, window, 60);
    let mut csv = String::from("tau_ps,coincidences\n");
    for (i, &c) in hbt.delay_counts.iter().enumerate() {
        let center = 0.5 * (hbt.delay_bin_edges[i] + hbt.delay_bin_edges[i + 1]);
        csv.push_str(&format!("{center:.4},{c}\n"));
    }
    write_file(&cfg.out_dir.join("hbt_histogram.csv"), &csv)?;

    if jump_log {
        let mut csv = String::from("traj_id,t_ps,channel\n");
        for (i, rec) in point.ensemble.records.iter().enumerate() {
            for &t in &rec.emissions {
                csv.push_str(&format!("{i},{t:.6},emission\n"));
            }
        }
        write_file(&cfg.out_dir.join("jump_log.csv"), &csv)?;
    }

    let out = FomJson {
        preset: cfg.preset.name(),
        oracle: OracleFom {
            eta: stats.p1,
            g2: stats.g2,
            indist: hom.indist,
            overlap: point.overlap,
            mean_photons: stats.mean_photons,
            max_population: stats.max_population,
        },
        estimator: EstimatorFom {
            eta: point.eta.value,
            eta_se: point.eta.se,
            g2: point.g2.value,
            g2_se: point.g2.se,
            indist: point.indist.value,
            indist_se: point.indist.se,
            n_traj: cfg.n_traj,
            seed: cfg.seed,
        },
        hbt_g2: hbt.g2.value,
        hbt_g2_se: hbt.g2.se,
    };
    write_json(&cfg.out_dir.join("fom.json"), &out)?;
    write_record(cfg, "fom")?;

    println!(
        "fom {} (n_traj {} seed {}):",
        cfg.preset.name(),
        cfg.n_traj,
        cfg.seed
    );
    println!(
        "  oracle     eta {:.4}  g2 {:.4}  indist {:.4}  overlap {:.4e}",
        stats.p1, stats.g2, hom.indist, point.overlap
    );
    println!(
        "  estimator  eta {:.4}±{:.4}  g2 {:.4}±{:.4}  indist {:.4}±{:.4}  (hbt g2 {:.4}±{:.4})",
        point.eta.value,
        point.eta.se,
        point.g2.value,
        point.g2.se,
        point.indist.value,
        point.indist.se,
        hbt.g2.value,
        hbt.g2.se
    );
    println!("wrote fom.json, hbt_histogram.csv");
    Ok(())
}

// ---------------------------------------------------------------------------
// sweeps
// ---------------------------------------------------------------------------

fn sweep_row(built: &Built, n_traj: usize, seed: u64) -> Result<(FomPoint, String)> {
    let p = stochastic_fom(built, n_traj, seed)?;
    let row = format!(
        "{:.6e},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        p.overlap, p.eta.value, p.eta.se, p.g2.value, p.g2.se, p.indist.value, p.indist.se
    );
    Ok((p, row))
}

const SWEEP_METRIC_COLUMNS: &str = "overlap,eta,eta_se,g2,g2_se,indist,indist_se";

/// Open a sweep CSV and stream rows as points finish, so an interrupted scan
/// keeps all completed rows.
fn sweep_writer(path: &Path, header: &str) -> Result<std::io::BufWriter<std::fs::File>> {
    let f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = std::io::BufWriter::new(f);
    writeln!(w, "{header}").map_err(|e| io_err(path, e))?;
    Ok(w)
}

pub fn cmd_sweep_gap(
    cfg: &RunConfig,
    points: usize,
    min: Option<f64>,
    max: Option<f64>,
) -> Result<()> {
    if points < 2 {
        return Err(Error::Config("sweep needs at least 2 points".into()));
    }
    let path = cfg.out_dir.join("sweep_gap.csv");
    match &cfg.scheme {
        SchemeParams::Dichromatic(base) => {
            // Axis: dimensionless spectral separation δ·t_p, amplitude
            // re-calibrated to pulse area π at every point.
            let x0 = min.unwrap_or(0.0);
            let x1 = max.unwrap_or(2.0 * base.delta * base.t_p);
            let mut w = sweep_writer(&path, &format!("delta_tp,delta_mev,{SWEEP_METRIC_COLUMNS}"))?;
            for k in 0..points {
                let x = x0 + (x1 - x0) * k as f64 / (points - 1) as f64;
                let mut cfg_k = cfg.clone();
                if let SchemeParams::Dichromatic(p) = &mut cfg_k.scheme {
                    p.delta = x / p.t_p;
                    p.amplitude = None;
                }
                let built = build(&cfg_k)?;
                let (_, row) = sweep_row(&built, cfg.n_traj, cfg.seed.wrapping_add(k as u64))?;
                let delta_mev = radps_to_mev(x / base.t_p);
                writeln!(w, "{x:.6},{delta_mev:.6},{row}").map_err(|e| io_err(&path, e))?;
                w.flush().map_err(|e| io_err(&path, e))?;
                println!("  delta_tp {x:.4} done");
            }
        }
        SchemeParams::Narp(base) => {
            // Axis: spectral-hole width multiplier relative to the preset δ.
            let x0 = min.unwrap_or(0.5);
            let x1 = max.unwrap_or(4.0);
            let mut w = sweep_writer(
                &path,
                &format!("hole_width_factor,hole_width_mev,{SWEEP_METRIC_COLUMNS}"),
            )?;
            for k in 0..points {
                let x = x0 + (x1 - x0) * k as f64 / (points - 1) as f64;
                let mut cfg_k = cfg.clone();
                if let SchemeParams::Narp(p) = &mut cfg_k.scheme {
                    p.hole_width_factor = x;
                }
                let built = build(&cfg_k)?;
                let (_, row) = sweep_row(&built, cfg.n_traj, cfg.seed.wrapping_add(k as u64))?;
                let width_mev = radps_to_mev(base.delta_hole * x);
                writeln!(w, "{x:.6},{width_mev:.6},{row}").map_err(|e| io_err(&path, e))?;
                w.flush().map_err(|e| io_err(&path, e))?;
                println!("  hole_width_factor {x:.4} done");
            }
        }
        SchemeParams::Super(_) => {
            return Err(Error::Config(
                "sweep-gap applies to dichromatic and NARP schemes; use sweep-super".into(),
            ));
        }
    }
    write_record(cfg, "sweep-gap")?;
    println!("wrote sweep_gap.csv");
    Ok(())
}

pub fn cmd_sweep_super(cfg: &RunConfig, axis: SuperAxis, points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::Config("sweep needs at least 2 points".into()));
    }
    let SchemeParams::Super(base) = &cfg.scheme else {
        return Err(Error::Config("sweep-super requires the super scheme".into()));
    };
    let base = base.clone();
    // Scan ranges around the preset values: amplitudes and widths ±30%,
    // detuning ±2% (the swing-up condition is detuning-critical).
    let (name, lo, hi) = match axis {
        SuperAxis::Omega2 => ("omega2_mev", 0.7, 1.3),
        SuperAxis::Tp2 => ("t_p2_ps", 0.7, 1.3),
        SuperAxis::Delta2 => ("delta2_mev", 0.98, 1.02),
    };
    let path = cfg.out_dir.join("sweep_super.csv");
    let mut w = sweep_writer(&path, &format!("{name},scale,{SWEEP_METRIC_COLUMNS}"))?;
    for k in 0..points {
        let s = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let mut cfg_k = cfg.clone();
        let SchemeParams::Super(p) = &mut cfg_k.scheme else {
            unreachable!("scheme checked above");
        };
        let axis_value = match axis {
            SuperAxis::Omega2 => {
                p.omega2 = base.omega2 * s;
                radps_to_mev(p.omega2)
            }
            SuperAxis::Tp2 => {
                p.t_p2 = base.t_p2 * s;
                p.t_p2
            }
            SuperAxis::Delta2 => {
                p.delta2 = base.delta2 * s;
                radps_to_mev(p.delta2)
            }
        };
        let built = build(&cfg_k)?;
        let (_, row) = sweep_row(&built, cfg.n_traj, cfg.seed.wrapping_add(k as u64))?;
        writeln!(w, "{axis_value:.6},{s:.6},{row}").map_err(|e| io_err(&path, e))?;
        w.flush().map_err(|e| io_err(&path, e))?;
        println!("  {name} {axis_value:.4} done");
    }
    write_record(cfg, "sweep-super")?;
    println!("wrote sweep_super.csv");
    Ok(())
}

// ---------------------------------------------------------------------------
// info
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct InfoJson {
    franck_condon_b: f64,
    indistinguishability_cap_b4: f64,
    polaron_shift_mev: f64,
    preset: &'static str,
    peak_amplitude_mev: f64,
    pulse_area_pi: f64,
    spectral_overlap: f64,
    recommended_dt_ps: f64,
    adiabaticity_max: f64,
}

/// Worst-case adiabaticity ratio |dθ/dt| / ε_R of the dressed states along
/// the drive, θ = atan2(|Ω|, Δ_nominal), ε_R = √(Ω² + Δ²). Values ≪ 1 mean
/// the sweep follows the adiabatic eigenstate (the ARP operating regime).
fn adiabaticity_max(built: &Built) -> f64 {
    let g = &built.setup.drive;
    let amax = g.max_abs_env();
    if amax == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    let mut prev_theta: Option<f64> = None;
    for i in 0..g.len() {
        let a = g.env[i].norm();
        let d = g.nominal_detuning[i] + g.frame_detuning + built.frame_shift;
        if a < 1e-3 * amax {
            prev_theta = None;
            continue;
        }
        let theta = a.atan2(d);
        if let Some(pt) = prev_theta {
            let rate = (theta - pt).abs() / g.dt;
            let gap = (a * a + d * d).sqrt();
            if gap > 0.0 {
                worst = worst.max(rate / gap);
            }
        }
        prev_theta = Some(theta);
    }
    worst
}

pub fn cmd_info(cfg: &RunConfig) -> Result<()> {
    let ph = cfg.phonon.unwrap_or_default();
    let b = franck_condon(&ph);
    let cap = indistinguishability_cap(&ph);
    let dp = polaron_shift(&ph);

    let built = build(cfg)?;
    let drive = &built.setup.drive;
    let model = built.model();
    let sd = built.setup.spectrum();
    let adiab = adiabaticity_max(&built);

    let out = InfoJson {
        franck_condon_b: b,
        indistinguishability_cap_b4: cap,
        polaron_shift_mev: radps_to_mev(dp),
        preset: cfg.preset.name(),
        peak_amplitude_mev: radps_to_mev(drive.max_abs_env()),
        pulse_area_pi: drive.integral_env().norm() / std::f64::consts::PI,
        spectral_overlap: overlap_default(&sd),
        recommended_dt_ps: model.recommended_dt(),
        adiabaticity_max: adiab,
    };
    write_json(&cfg.out_dir.join("info.json"), &out)?;
    write_record(cfg, "info")?;

    println!("phonon bath: T {} K, alpha {} ps^2, omega_b {:.4} meV", ph.temperature, ph.alpha, radps_to_mev(ph.omega_b));
    println!("  Franck-Condon <B> = {b:.4}");
    println!("  indistinguishability cap <B>^4 = {cap:.4}");
    println!("  polaron shift = {:.4} meV ({:.4} rad/ps)", radps_to_mev(dp), dp);
    println!("pulse {}:", cfg.preset.name());
    println!("  peak amplitude {:.4} meV", out.peak_amplitude_mev);
    println!("  pulse area {:.4} π", out.pulse_area_pi);
    println!("  spectral overlap {:.4e}", out.spectral_overlap);
    println!("  recommended dt {:.3e} ps", out.recommended_dt_ps);
    println!("  adiabaticity max |dθ/dt|/ε_R = {adiab:.4}");
    println!("wrote info.json");
    Ok(())
}
