//! Monte-Carlo wave-function (quantum-jump) unraveling of the driven emitter,
//! with deterministic parallel seeding and the photon-statistics estimators.
//!
//! Protocol per trajectory: draw r ~ U(0,1); integrate
//! d|ψ⟩/dt = −iH_eff|ψ⟩ with H_eff = H − (i/2)Σ r_k C_k†C_k (time-dependent
//! rates); when ‖ψ‖² crosses r, bisect the crossing time to dt/10, pick
//! channel k with probability ∝ r_k‖C_kψ‖², apply C_k, renormalize, redraw r.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::drive::{DriveModel, DT_TAIL};
use crate::stats::{binomial_estimate, bootstrap_se, rng_for, Estimate};
use crate::{Error, Result};

/// RNG stream tags (see [`crate::stats::split_seed`]).
pub const STREAM_TRAJ: u64 = 1;
pub const STREAM_TRAJ_PAIR_A: u64 = 2;
pub const STREAM_TRAJ_PAIR_B: u64 = 3;
pub const STREAM_ROUTING: u64 = 4;
pub const STREAM_HOM: u64 = 5;

/// Dissipation channels of the single emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Radiative emission into the waveguide (√γ σ⁻) — a detected photon.
    Emission,
    /// Phonon pure dephasing (√γ′_eff σ⁺σ⁻).
    Dephasing,
    /// Phonon incoherent excitation (√Γ⁺ σ⁺).
    Raise,
}

impl Channel {
    pub fn label(&self) -> &'static str {
        match self {
            Channel::Emission => "emission",
            Channel::Dephasing => "dephasing",
            Channel::Raise => "raise",
        }
    }
}

/// One trajectory's outcome.
#[derive(Debug, Clone, Default)]
pub struct TrajectoryRecord {
    /// Times of emission (photon) jumps, ps.
    pub emissions: Vec<f64>,
    /// Number of dephasing jumps.
    pub n_dephasing: u32,
    /// Number of incoherent-excitation jumps.
    pub n_raise: u32,
    /// Excited-state population sampled at the requested probe times.
    pub population_probe: Vec<f64>,
}

/// Extra knobs for trajectory runs.
#[derive(Debug, Clone, Default)]
pub struct TrajOptions {
    /// Override the automatic pulse-window step, ps.
    pub dt_override: Option<f64>,
    /// Record ⟨N⟩ at these times (normalized expectation per trajectory).
    pub probe_times: Vec<f64>,
}

struct State2 {
    c: [Complex64; 2], // (c_g, c_e)
}

impl State2 {
    fn norm_sqr(&self) -> f64 {
        self.c[0].norm_sqr() + self.c[1].norm_sqr()
    }
}

/// RK4 step of the non-Hermitian evolution over [t, t+h].
#[inline]
fn rk4_step(model: &DriveModel, psi: &[Complex64; 2], t: f64, h: f64) -> [Complex64; 2] {
    let fd = model.frame_detuning();
    let gamma = model.gamma;
    let deriv = |c: &[Complex64; 2], tt: f64| -> [Complex64; 2] {
        let p = model.sample(tt);
        let hge = 0.5 * p.env.conj();
        let heg = 0.5 * p.env;
        let i = Complex64::new(0.0, 1.0);
        [
            -i * (hge * c[1]) - 0.5 * p.gamma_up * c[0],
            -i * (heg * c[0] + fd * c[1]) - 0.5 * (gamma + p.gamma_pd) * c[1],
        ]
    };
    let k1 = deriv(psi, t);
    let p2 = [psi[0] + k1[0] * (0.5 * h), psi[1] + k1[1] * (0.5 * h)];
    let k2 = deriv(&p2, t + 0.5 * h);
    let p3 = [psi[0] + k2[0] * (0.5 * h), psi[1] + k2[1] * (0.5 * h)];
    let k3 = deriv(&p3, t + 0.5 * h);
    let p4 = [psi[0] + k3[0] * h, psi[1] + k3[1] * h];
    let k4 = deriv(&p4, t + h);
    [
        psi[0] + (k1[0] + (k2[0] + k3[0]) * 2.0 + k4[0]) * (h / 6.0),
        psi[1] + (k1[1] + (k2[1] + k3[1]) * 2.0 + k4[1]) * (h / 6.0),
    ]
}

/// Exact free-decay propagation (no drive, no phonon rates): the excited
/// amplitude rotates at the frame detuning and decays at γ/2. Used for the
/// post-pulse tail, where RK4 at the coarse tail step would be unstable for
/// large frame detunings; this closed form is valid for any step size.
#[inline]
fn exact_tail_step(model: &DriveModel, psi: &[Complex64; 2], h: f64) -> [Complex64; 2] {
    let z = Complex64::new(-0.5 * model.gamma * h, -model.frame_detuning() * h).exp();
    [psi[0], psi[1] * z]
}

/// Run one quantum-jump trajectory from the ground state.
pub fn run_trajectory(
    model: &DriveModel,
    rng: &mut ChaCha8Rng,
    opts: &TrajOptions,
) -> Result<TrajectoryRecord> {
    let (t_start, t_end) = model.window();
    let dt_pulse = opts.dt_override.unwrap_or_else(|| model.recommended_dt());
    let tail_end = model.tail_end();
    let mut rec = TrajectoryRecord::default();
    let mut psi = State2 {
        c: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    };
    let mut threshold: f64 = rng.gen();
    let mut probe_iter = opts.probe_times.iter().peekable();

    let phases = [
        (t_start, t_end, dt_pulse, false),
        (t_end, tail_end, DT_TAIL, true),
    ];
    for (p_start, p_end, dt, tail) in phases {
        let step = |c: &[Complex64; 2], tt: f64, h: f64| {
            if tail {
                exact_tail_step(model, c, h)
            } else {
                rk4_step(model, c, tt, h)
            }
        };
        let mut t = p_start;
        while t < p_end - 1e-12 {
            let h = dt.min(p_end - t);
            let prev_norm = psi.norm_sqr();
            let next = step(&psi.c, t, h);
            let next_norm = next[0].norm_sqr() + next[1].norm_sqr();
            if next_norm > prev_norm * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::Numerical(format!(
                    "trajectory norm increased at t = {t:.3} ps ({prev_norm:.12} -> {next_norm:.12})"
                )));
            }
            if next_norm <= threshold {
                // Bisect the crossing time to h/10 accuracy.
                let mut ta = t;
                let mut psi_a = [psi.c[0], psi.c[1]];
                let mut tb = t + h;
                while tb - ta > h / 10.0 {
                    let tm = 0.5 * (ta + tb);
                    let pm = step(&psi_a, ta, tm - ta);
                    if pm[0].norm_sqr() + pm[1].norm_sqr() > threshold {
                        ta = tm;
                        psi_a = pm;
                    } else {
                        tb = tm;
                    }
                }
                let t_jump = 0.5 * (ta + tb);
                let at_jump = step(&psi_a, ta, t_jump - ta);
                // Channel ∝ r_k ‖C_k ψ‖².
                let p = model.sample(t_jump);
                let w_em = model.gamma * at_jump[1].norm_sqr();
                let w_de = p.gamma_pd * at_jump[1].norm_sqr();
                let w_up = p.gamma_up * at_jump[0].norm_sqr();
                let total = w_em + w_de + w_up;
                if total <= 0.0 {
                    return Err(Error::Numerical(format!(
                        "no jump channel available at t = {t_jump:.3} ps"
                    )));
                }
                let u: f64 = rng.gen::<f64>() * total;
                let (channel, new_state) = if u < w_em {
                    (Channel::Emission, [at_jump[1], Complex64::new(0.0, 0.0)])
                } else if u < w_em + w_de {
                    (Channel::Dephasing, [Complex64::new(0.0, 0.0), at_jump[1]])
                } else {
                    (Channel::Raise, [Complex64::new(0.0, 0.0), at_jump[0]])
                };
                match channel {
                    Channel::Emission => rec.emissions.push(t_jump),
                    Channel::Dephasing => rec.n_dephasing += 1,
                    Channel::Raise => rec.n_raise += 1,
                }
                let norm = (new_state[0].norm_sqr() + new_state[1].norm_sqr()).sqrt();
                psi.c = [new_state[0] / norm, new_state[1] / norm];
                threshold = rng.gen();
                // Finish the remainder of this step from the jump time.
                let rem = t + h - t_jump;
                if rem > 1e-12 {
                    psi.c = step(&psi.c, t_jump, rem);
                }
            } else {
                psi.c = next;
            }
            t += h;
            while let Some(&&tp) = probe_iter.peek() {
                if tp <= t {
                    let n2 = psi.norm_sqr();
                    rec.population_probe.push(psi.c[1].norm_sqr() / n2);
                    probe_iter.next();
                } else {
                    break;
                }
            }
        }
    }
    Ok(rec)
}

/// Ensemble results: per-trajectory records in trajectory-index order
/// (deterministic under any parallel schedule).
#[derive(Debug, Clone)]
pub struct EnsembleStats {
    pub records: Vec<TrajectoryRecord>,
    pub n_traj: usize,
    pub master_seed: u64,
}

impl EnsembleStats {
    /// Photon counts per trajectory.
    pub fn counts(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.emissions.len() as u32).collect()
    }

    /// Mean excited-state population at the probe times.
    pub fn mean_population_probe(&self) -> Vec<f64> {
        if self.records.is_empty() || self.records[0].population_probe.is_empty() {
            return Vec::new();
        }
        let m = self.records[0].population_probe.len();
        let mut acc = vec![0.0f64; m];
        for r in &self.records {
            for (a, &p) in acc.iter_mut().zip(r.population_probe.iter()) {
                *a += p;
            }
        }
        for a in acc.iter_mut() {
            *a /= self.records.len() as f64;
        }
        acc
    }
}

/// Run `n_traj` independent trajectories in parallel with counter-based
/// per-trajectory seeds derived from `master_seed` (stream `stream_tag`).
pub fn run_ensemble(
    model: &DriveModel,
    n_traj: usize,
    master_seed: u64,
    stream_tag: u64,
    opts: &TrajOptions,
) -> Result<EnsembleStats> {
    if n_traj == 0 {
        return Err(Error::Config("n_traj must be positive".into()));
    }
    let records: Vec<Result<TrajectoryRecord>> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(master_seed, stream_tag, i as u64);
            run_trajectory(model, &mut rng, opts)
        })
        .collect();
    let mut out = Vec::with_capacity(n_traj);
    for r in records {
        out.push(r?);
    }
    Ok(EnsembleStats {
        records: out,
        n_traj,
        master_seed,
    })
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/// Efficiency η = P(exactly one photon) with binomial standard error.
pub fn eta_from_counts(stats: &EnsembleStats) -> Estimate {
    let ones = stats.records.iter().filter(|r| r.emissions.len() == 1).count();
    binomial_estimate(ones, stats.n_traj)
}

fn g2_statistic(counts: &[u32]) -> f64 {
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&m| m as f64).sum::<f64>() / n;
    if mean <= 0.0 {
        return 0.0;
    }
    let fact = counts
        .iter()
        .map(|&m| (m as f64) * (m as f64 - 1.0))
        .sum::<f64>()
        / n;
    fact / (2.0 * mean * mean)
}

/// g²(0) = ⟨m(m−1)⟩/(2⟨m⟩²) from trajectory photon counts, with a bootstrap
/// standard error (1000 resamples, deterministic).
pub fn g2_from_counts(stats: &EnsembleStats) -> Estimate {
    let counts = stats.counts();
    let value = g2_statistic(&counts);
    let se = bootstrap_se(&counts, 1000, stats.master_seed, |c| g2_statistic(c));
    Estimate::new(value, se)
}

/// Hanbury Brown–Twiss simulation: each photon is routed to detector A or B
/// by a fair coin; same-pulse coincidences are compared with cross-pulse
/// coincidences obtained by pairing consecutive trajectories as consecutive
/// pulses.
#[derive(Debug, Clone)]
pub struct HbtResult {
    /// Histogram of same-pulse A–B delays (τ = t_B − t_A), symmetric window.
    pub delay_bin_edges: Vec<f64>,
    pub delay_counts: Vec<u64>,
    /// Mean same-pulse coincidence pairs per trajectory.
    pub mean_same: f64,
    /// Mean cross-pulse coincidence pairs per trajectory pair (order-averaged).
    pub mean_cross: f64,
    /// g²(0) estimate = mean_same / (2·mean_cross), matching the ordered-pair
    /// normalization of [`g2_from_counts`].
    pub g2: Estimate,
}

pub fn hbt_histogram(stats: &EnsembleStats, window: f64, n_bins: usize) -> HbtResult {
    // Route photons with a dedicated deterministic stream.
    let routed: Vec<(Vec<f64>, Vec<f64>)> = stats
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut rng = rng_for(stats.master_seed, STREAM_ROUTING, i as u64);
            let mut a = Vec::new();
            let mut b = Vec::new();
            for &t in &r.emissions {
                if rng.gen::<bool>() {
                    a.push(t)
                } else {
                    b.push(t)
                }
            }
            (a, b)
        })
        .collect();

    let mut edges = Vec::with_capacity(n_bins + 1);
    for i in 0..=n_bins {
        edges.push(-window + 2.0 * window * i as f64 / n_bins as f64);
    }
    let mut hist = vec![0u64; n_bins];
    let mut same_pairs = Vec::with_capacity(routed.len());
    for (a, b) in &routed {
        same_pairs.push((a.len() * b.len()) as u32);
        for &ta in a {
            for &tb in b {
                let tau = tb - ta;
                if tau.abs() <= window {
                    let idx = (((tau + window) / (2.0 * window)) * n_bins as f64) as usize;
                    hist[idx.min(n_bins - 1)] += 1;
                }
            }
        }
    }
    let mut cross_pairs = Vec::with_capacity(routed.len().saturating_sub(1));
    for w in routed.windows(2) {
        let (a0, b0) = &w[0];
        let (a1, b1) = &w[1];
        // Average both orderings so the pair estimate is E[n_A]E[n_B].
        cross_pairs.push(0.5 * (a0.len() * b1.len() + b0.len() * a1.len()) as f64);
    }
    let mean_same = same_pairs.iter().map(|&x| x as f64).sum::<f64>() / same_pairs.len() as f64;
    let mean_cross = cross_pairs.iter().sum::<f64>() / cross_pairs.len() as f64;
    let ratio = |same: &[u32], cross_mean: f64| -> f64 {
        if cross_mean <= 0.0 {
            return 0.0;
        }
        let ms = same.iter().map(|&x| x as f64).sum::<f64>() / same.len() as f64;
        ms / (2.0 * cross_mean)
    };
    let value = ratio(&same_pairs, mean_cross);
    // Bootstrap over trajectories: resample (same, photon-count) jointly and
    // recompute both the numerator and the cross normalization.
    let joint: Vec<(u32, u32, u32)> = routed
        .iter()
        .zip(same_pairs.iter())
        .map(|((a, b), &s)| (s, a.len() as u32, b.len() as u32))
        .collect();
    let se = bootstrap_se(&joint, 1000, stats.master_seed ^ 0x4b7, |sample| {
        let ms = sample.iter().map(|x| x.0 as f64).sum::<f64>() / sample.len() as f64;
        let mut mc = 0.0;
        for w in sample.windows(2) {
            mc += 0.5 * (w[0].1 as u64 * w[1].2 as u64 + w[0].2 as u64 * w[1].1 as u64) as f64;
        }
        mc /= (sample.len() - 1) as f64;
        if mc > 0.0 {
            ms / (2.0 * mc)
        } else {
            0.0
        }
    });
    HbtResult {
        delay_bin_edges: edges,
        delay_counts: hist,
        mean_same,
        mean_cross,
        g2: Estimate::new(value, se),
    }
}
