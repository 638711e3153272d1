//! Longitudinal-acoustic phonon environment of the quantum-dot exciton.
//!
//! Super-ohmic spectral density with Gaussian cutoff,
//! J_P(ω) = α_ph ω³ e^{−ω²/2ω_b²}, and the weak-coupling, drive-dependent
//! rates evaluated along the pulse: pure dephasing γ′_eff(t) and incoherent
//! excitation Γ⁺(t), both functions of the instantaneous dressed splitting
//! ε′_R = √(ε′² + Δ²) with ε′ = |env(t)| and Δ = nominal detuning.

use serde::Serialize;
use std::f64::consts::PI;

use crate::pulse::EnvelopeGrid;
use crate::units::{HBAR_MEV_PS, KB_MEV_PER_K};

/// Phonon-environment parameters (defaults for an InGaAs dot at 4 K).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhononParams {
    /// Deformation-potential coupling α_ph, ps².
    pub alpha: f64,
    /// Gaussian cutoff frequency ω_b, rad/ps.
    pub omega_b: f64,
    /// Lattice temperature, K.
    pub temperature: f64,
}

impl Default for PhononParams {
    fn default() -> Self {
        Self {
            alpha: 0.03,
            omega_b: 0.9 / HBAR_MEV_PS,
            temperature: 4.0,
        }
    }
}

/// J_P(ω) = α_ph ω³ e^{−ω²/2ω_b²} (rad/ps); J_P(0) = 0.
pub fn spectral_function(omega: f64, p: &PhononParams) -> f64 {
    p.alpha * omega.powi(3) * (-omega * omega / (2.0 * p.omega_b * p.omega_b)).exp()
}

/// Drive-dependent phonon rates sampled on the pulse grid, rad/ps.
#[derive(Debug, Clone)]
pub struct PhononRateTrace {
    /// Pure-dephasing rate γ′_eff(t).
    pub gamma_pd: Vec<f64>,
    /// Incoherent-excitation rate Γ⁺(t).
    pub gamma_up: Vec<f64>,
}

impl PhononRateTrace {
    pub fn peak_pd(&self) -> f64 {
        self.gamma_pd.iter().cloned().fold(0.0, f64::max)
    }

    pub fn peak_up(&self) -> f64 {
        self.gamma_up.iter().cloned().fold(0.0, f64::max)
    }

    /// All-zero trace of length n (dissipation off).
    pub fn zero(n: usize) -> Self {
        Self {
            gamma_pd: vec![0.0; n],
            gamma_up: vec![0.0; n],
        }
    }
}

/// Evaluate γ′_eff and Γ⁺ along the pulse:
///
/// γ′_eff = π (ε′/ε′_R)² J_P(ε′_R) coth(ħε′_R / 2k_B T),
/// Γ⁺    = (π/4) (ε′/ε′_R) J_P(ε′_R),
///
/// with the ε′_R → 0 limit (below 10⁻⁶ ω_b) taken analytically:
/// γ′_eff → 2π α_ph (k_B T/ħ) ε′², Γ⁺ → 0.
pub fn rates_along_pulse(grid: &EnvelopeGrid, p: &PhononParams) -> PhononRateTrace {
    let kt = KB_MEV_PER_K * p.temperature / HBAR_MEV_PS; // thermal freq, rad/ps
    let n = grid.len();
    let mut gamma_pd = Vec::with_capacity(n);
    let mut gamma_up = Vec::with_capacity(n);
    for i in 0..n {
        let eps = grid.env[i].norm();
        let det = grid.nominal_detuning[i];
        let eps_r = (eps * eps + det * det).sqrt();
        if eps_r < 1e-6 * p.omega_b {
            gamma_pd.push(2.0 * PI * p.alpha * kt * eps * eps);
            gamma_up.push(0.0);
        } else {
            let j = spectral_function(eps_r, p);
            let coth = 1.0 / (eps_r / (2.0 * kt)).tanh();
            let ratio = eps / eps_r;
            gamma_pd.push(PI * ratio * ratio * j * coth);
            gamma_up.push(0.25 * PI * ratio * j);
        }
    }
    PhononRateTrace { gamma_pd, gamma_up }
}

/// Polaron shift Δ_P = ∫₀^∞ J_P(ω)/ω dω = α_ph ω_b³ √(π/2), rad/ps.
pub fn polaron_shift(p: &PhononParams) -> f64 {
    p.alpha * p.omega_b.powi(3) * (PI / 2.0).sqrt()
}

/// Franck–Condon factor ⟨B⟩ = exp(−½ ∫₀^∞ J_P(ω)/ω² coth(ħω/2k_BT) dω),
/// evaluated with adaptive Simpson quadrature to 10⁻⁸ absolute accuracy on
/// the exponent.
pub fn franck_condon(p: &PhononParams) -> f64 {
    let kt = KB_MEV_PER_K * p.temperature / HBAR_MEV_PS;
    let integrand = |w: f64| -> f64 {
        if w < 1e-12 {
            // J/ω²·coth → α_ph·ω·(2kT/ω) = 2 α_ph kT as ω → 0
            return 2.0 * p.alpha * kt;
        }
        let j = spectral_function(w, p);
        j / (w * w) / (w / (2.0 * kt)).tanh()
    };
    // Integrand is Gaussian-suppressed: 10 cutoffs is far beyond machine tail.
    let upper = 10.0 * p.omega_b;
    let integral = adaptive_simpson(&integrand, 0.0, upper, 1e-8);
    (-0.5 * integral).exp()
}

/// Upper bound ⟨B⟩⁴ on the unfiltered photon indistinguishability imposed by
/// phonon-sideband emission.
pub fn indistinguishability_cap(p: &PhononParams) -> f64 {
    franck_condon(p).powi(4)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (left, flm) = simpson(f, a, fa, m, fm);
        let (right, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, fm, tol, 40)
}
