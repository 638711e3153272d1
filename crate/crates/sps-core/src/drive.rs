//! Shared description of "what drives the emitter": pulse envelope, constant
//! frame detuning, radiative rate, and the phonon rate traces. Both the
//! deterministic master-equation oracle and the stochastic trajectory solver
//! sample the same model, so their discretizations agree by construction.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::phonon::PhononRateTrace;
use crate::pulse::EnvelopeGrid;
use crate::units::GAMMA_RAD_PS;

/// Hard ceiling on the integration step, ps.
pub const DT_CAP: f64 = 4e-3;
/// Coarse step used during free decay after the pulse window, ps.
pub const DT_TAIL: f64 = 0.25;
/// Default tail length in radiative lifetimes.
pub const TAIL_LIFETIMES: f64 = 10.0;

/// Instantaneous drive/bath sample.
#[derive(Debug, Clone, Copy)]
pub struct DrivePoint {
    /// Complex Rabi envelope, rad/ps.
    pub env: Complex64,
    /// Pure-dephasing rate γ′_eff(t), rad/ps.
    pub gamma_pd: f64,
    /// Incoherent-excitation rate Γ⁺(t), rad/ps.
    pub gamma_up: f64,
}

/// The full driven-emitter model used by all solvers.
#[derive(Debug, Clone)]
pub struct DriveModel<'a> {
    pub grid: &'a EnvelopeGrid,
    /// Radiative decay rate γ, rad/ps.
    pub gamma: f64,
    /// Phonon rates aligned with `grid`; `None` = dissipation off.
    pub rates: Option<&'a PhononRateTrace>,
    /// Extra constant detuning added to the frame (e.g. polaron shift), rad/ps.
    pub frame_shift: f64,
}

impl<'a> DriveModel<'a> {
    pub fn new(grid: &'a EnvelopeGrid, rates: Option<&'a PhononRateTrace>) -> Self {
        Self {
            grid,
            gamma: GAMMA_RAD_PS,
            rates,
            frame_shift: 0.0,
        }
    }

    /// Effective frame detuning entering the Hamiltonian diagonal.
    pub fn frame_detuning(&self) -> f64 {
        self.grid.frame_detuning + self.frame_shift
    }

    /// Interpolated envelope and rates at time `t` (zero outside the grid).
    pub fn sample(&self, t: f64) -> DrivePoint {
        let x = (t - self.grid.t0) / self.grid.dt;
        let nmax = (self.grid.len() - 1) as f64;
        if !(0.0..=nmax).contains(&x) {
            return DrivePoint {
                env: Complex64::new(0.0, 0.0),
                gamma_pd: 0.0,
                gamma_up: 0.0,
            };
        }
        let i = (x.floor() as usize).min(self.grid.len() - 2);
        let f = x - i as f64;
        let env = self.grid.env[i] * (1.0 - f) + self.grid.env[i + 1] * f;
        let (gamma_pd, gamma_up) = match self.rates {
            Some(r) => (
                (r.gamma_pd[i] * (1.0 - f) + r.gamma_pd[i + 1] * f).max(0.0),
                (r.gamma_up[i] * (1.0 - f) + r.gamma_up[i + 1] * f).max(0.0),
            ),
            None => (0.0, 0.0),
        };
        DrivePoint {
            env,
            gamma_pd,
            gamma_up,
        }
    }

    /// Fixed integration step for the pulse window: a small fraction of the
    /// fastest period present (peak Rabi frequency, frame detuning, envelope
    /// phase slew), capped at [`DT_CAP`].
    pub fn recommended_dt(&self) -> f64 {
        let wmax = self.grid.max_abs_env()
            + self.frame_detuning().abs()
            + self.grid.max_phase_gradient();
        (0.01 * 2.0 * PI / wmax.max(1e-9)).min(DT_CAP)
    }

    /// Pulse-window bounds (t_start, t_end), ps.
    pub fn window(&self) -> (f64, f64) {
        (self.grid.t0, self.grid.t_end())
    }

    /// End of the free-decay tail appended after the window, ps.
    pub fn tail_end(&self) -> f64 {
        self.grid.t_end() + TAIL_LIFETIMES / self.gamma
    }
}
