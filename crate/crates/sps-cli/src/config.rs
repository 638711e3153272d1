//! Run configuration: preset resolution, flat key=value config files, and the
//! reproducibility record.
//!
//! Config files use dotted keys with table units (meV, ps, K), one assignment
//! per line, `#` comments:
//!
//! ```text
//! preset = short-dichromatic
//! pulse.t_p_ps = 3.0
//! phonon.temperature_k = 4.0
//! solver.n_traj = 5000
//! ```

use serde::Serialize;
use sps_core::phonon::PhononParams;
use sps_core::pulse::{Preset, SchemeParams};
use sps_core::units::{ghz_to_radps, mev_to_radps};
use sps_core::Error;
use std::path::PathBuf;

/// Fully resolved run configuration (internal units).
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub preset: Preset,
    pub scheme: SchemeParams,
    /// `None` = phonon channels off.
    pub phonon: Option<PhononParams>,
    /// Radiative decay rate γ, rad/ps (0 = fully unitary drive).
    pub gamma: f64,
    /// Add the polaron shift to the frame detuning.
    pub polaron_shift: bool,
    pub seed: u64,
    pub n_traj: usize,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn from_preset(preset: Preset) -> Self {
        Self {
            preset,
            scheme: preset.params(),
            phonon: Some(PhononParams::default()),
            gamma: sps_core::units::GAMMA_RAD_PS,
            polaron_shift: false,
            seed: 7777,
            n_traj: 5000,
            out_dir: PathBuf::from("out"),
        }
    }

    /// Apply one `key = value` assignment (table units at the boundary).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let bad = |what: &str| {
            Error::Config(format!("invalid value '{value}' for key '{key}' ({what})"))
        };
        let f = || value.parse::<f64>().map_err(|_| bad("expected a number"));
        let b = || value.parse::<bool>().map_err(|_| bad("expected true/false"));
        let u = || value.parse::<u64>().map_err(|_| bad("expected an integer"));
        match key {
            "preset" => {
                let p = Preset::from_name(value)?;
                let keep = (self.seed, self.n_traj, self.polaron_shift, self.gamma);
                let phonon = self.phonon;
                *self = RunConfig::from_preset(p);
                self.phonon = phonon;
                (self.seed, self.n_traj, self.polaron_shift, self.gamma) = keep;
            }
            "qubit.gamma_ghz" => self.gamma = ghz_to_radps(f()?),
            "solver.seed" => self.seed = u()?,
            "solver.n_traj" => self.n_traj = u()? as usize,
            "phonon.enabled" => {
                self.phonon = if b()? { Some(self.phonon.unwrap_or_default()) } else { None }
            }
            "phonon.alpha_ps2" => self.phonon_mut().alpha = f()?,
            "phonon.omega_b_mev" => self.phonon_mut().omega_b = mev_to_radps(f()?),
            "phonon.temperature_k" => self.phonon_mut().temperature = f()?,
            "polaron_shift.enabled" => self.polaron_shift = b()?,
            _ if key.starts_with("pulse.") => self.apply_pulse(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    fn phonon_mut(&mut self) -> &mut PhononParams {
        self.phonon.get_or_insert_with(PhononParams::default)
    }

    fn apply_pulse(&mut self, key: &str, value: &str) -> Result<(), Error> {
        let fval = value
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("invalid number '{value}' for '{key}'")))?;
        let mismatch = |scheme: &str| {
            Error::Config(format!("key '{key}' does not apply to the {scheme} scheme"))
        };
        match (&mut self.scheme, key) {
            (_, "pulse.samples") => {
                let n = fval as usize;
                match &mut self.scheme {
                    SchemeParams::Dichromatic(p) => p.n = n,
                    SchemeParams::Narp(p) => p.n = n,
                    SchemeParams::Super(p) => p.n = n,
                }
            }
            (_, "pulse.window_factor") => match &mut self.scheme {
                SchemeParams::Dichromatic(p) => p.window_factor = fval,
                SchemeParams::Narp(p) => p.window_factor = fval,
                SchemeParams::Super(p) => p.window_factor = fval,
            },
            (SchemeParams::Dichromatic(p), "pulse.t_p_ps") => p.t_p = fval,
            (SchemeParams::Dichromatic(p), "pulse.delta_mev") => p.delta = mev_to_radps(fval),
            (SchemeParams::Dichromatic(p), "pulse.phi_rad") => p.phi = fval,
            (SchemeParams::Dichromatic(p), "pulse.amplitude_mev") => {
                p.amplitude = Some(mev_to_radps(fval))
            }
            (SchemeParams::Narp(p), "pulse.t_p_ps") => p.t_p = fval,
            (SchemeParams::Narp(p), "pulse.omega0_mev") => p.omega0 = mev_to_radps(fval),
            (SchemeParams::Narp(p), "pulse.alpha_ps2") => p.alpha = fval,
            (SchemeParams::Narp(p), "pulse.delta_hole_mev") => p.delta_hole = mev_to_radps(fval),
            (SchemeParams::Narp(p), "pulse.hole_width_factor") => p.hole_width_factor = fval,
            (SchemeParams::Super(p), "pulse.omega1_mev") => p.omega1 = mev_to_radps(fval),
            (SchemeParams::Super(p), "pulse.omega2_mev") => p.omega2 = mev_to_radps(fval),
            (SchemeParams::Super(p), "pulse.t_p1_ps") => p.t_p1 = fval,
            (SchemeParams::Super(p), "pulse.t_p2_ps") => p.t_p2 = fval,
            (SchemeParams::Super(p), "pulse.delta1_mev") => p.delta1 = mev_to_radps(fval),
            (SchemeParams::Super(p), "pulse.delta2_mev") => p.delta2 = mev_to_radps(fval),
            (SchemeParams::Super(p), "pulse.tau_ps") => p.tau = fval,
            (SchemeParams::Super(p), "pulse.phi_rad") => p.phi = fval,
            (SchemeParams::Dichromatic(_), _) => return Err(mismatch("dichromatic")),
            (SchemeParams::Narp(_), _) => return Err(mismatch("narp")),
            (SchemeParams::Super(_), _) => return Err(mismatch("super")),
        }
        Ok(())
    }

    /// Apply a config file's contents (applied in order; `preset` lines reset
    /// the scheme, so they should come first).
    pub fn apply_file(&mut self, text: &str, origin: &str) -> Result<(), Error> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("{origin}:{}: expected 'key = value'", lineno + 1))
            })?;
            self.apply(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("{origin}:{}: {e}", lineno + 1)))?;
        }
        Ok(())
    }
}

/// Self-contained reproducibility record written next to every command's
/// outputs. Re-running the recorded command line with the same crate version
/// reproduces all numeric outputs bit-identically.
#[derive(Debug, Serialize)]
pub struct RunRecord<'a> {
    pub tool_version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    /// Resolved configuration in internal units (rad/ps, ps, K).
    pub config: &'a RunConfig,
}

impl<'a> RunRecord<'a> {
    pub fn new(command: &str, config: &'a RunConfig) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv: std::env::args().collect(),
            config,
        }
    }
}
