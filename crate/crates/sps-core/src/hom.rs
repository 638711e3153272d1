//! Stochastic Hong–Ou–Mandel simulation: two identically driven, independent
//! emitters whose emission feeds a 50/50 beam splitter with output collapse
//! operators D± = √(γ/2)(σ₁⁻ ± σ₂⁻).
//!
//! The indistinguishability estimate compares the joint (interfering)
//! coincidence probability with a distinguishable baseline built from pairs
//! of *independent* single-emitter trajectories whose photons are routed
//! classically (fair coin per photon). A per-trajectory random drive phase on
//! emitter 2 is also available as an alternative reference mode, but it does
//! not destroy two-photon interference (the HOM dip depends on |⟨φ₁|φ₂⟩|²,
//! which is insensitive to a relative phase), so the independent-pair
//! baseline is the one used for the reported figure of merit.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::drive::{DriveModel, DT_TAIL};
use crate::stats::{binomial_estimate, rng_for, Estimate};
use crate::traj::{run_ensemble, TrajOptions, STREAM_HOM, STREAM_ROUTING, STREAM_TRAJ_PAIR_A, STREAM_TRAJ_PAIR_B};
use crate::{Error, Result};

/// Configuration of the two-emitter simulation.
#[derive(Debug, Clone)]
pub struct HomConfig {
    /// Multiplier on emitter 2's drive envelope (0 = undriven).
    pub emitter2_scale: f64,
    /// Draw a uniform random drive phase for emitter 2 per trajectory.
    pub emitter2_random_phase: bool,
}

impl Default for HomConfig {
    fn default() -> Self {
        Self {
            emitter2_scale: 1.0,
            emitter2_random_phase: false,
        }
    }
}

/// Joint-trajectory outcome.
#[derive(Debug, Clone, Copy, Default)]
pub struct HomTrajectory {
    pub clicks_plus: u32,
    pub clicks_minus: u32,
}

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Basis |q₁q₂⟩, index 2q₁+q₂: 0=gg, 1=ge, 2=eg, 3=ee.
#[inline]
fn deriv(
    model: &DriveModel,
    c: &[Complex64; 4],
    t: f64,
    m2: Complex64,
    out: &mut [Complex64; 4],
) {
    let p = model.sample(t);
    let fd = model.frame_detuning();
    let gamma = model.gamma;
    let e1 = 0.5 * p.env;
    let e2 = 0.5 * p.env * m2;
    let i = Complex64::new(0.0, 1.0);
    // H ψ
    let h0 = e1.conj() * c[2] + e2.conj() * c[1];
    let h1 = e2 * c[0] + e1.conj() * c[3] + fd * c[1];
    let h2 = e1 * c[0] + e2.conj() * c[3] + fd * c[2];
    let h3 = e1 * c[1] + e2 * c[2] + 2.0 * fd * c[3];
    // −½ Σ r_k C_k†C_k ψ (diagonal)
    let exc = 0.5 * (gamma + p.gamma_pd);
    let grd = 0.5 * p.gamma_up;
    out[0] = -i * h0 - 2.0 * grd * c[0];
    out[1] = -i * h1 - (exc + grd) * c[1];
    out[2] = -i * h2 - (exc + grd) * c[2];
    out[3] = -i * h3 - 2.0 * exc * c[3];
}

#[inline]
fn rk4_step4(
    model: &DriveModel,
    psi: &[Complex64; 4],
    t: f64,
    h: f64,
    m2: Complex64,
) -> [Complex64; 4] {
    let mut k1 = [C0; 4];
    let mut k2 = [C0; 4];
    let mut k3 = [C0; 4];
    let mut k4 = [C0; 4];
    let mut tmp = [C0; 4];
    deriv(model, psi, t, m2, &mut k1);
    for j in 0..4 {
        tmp[j] = psi[j] + k1[j] * (0.5 * h);
    }
    deriv(model, &tmp, t + 0.5 * h, m2, &mut k2);
    for j in 0..4 {
        tmp[j] = psi[j] + k2[j] * (0.5 * h);
    }
    deriv(model, &tmp, t + 0.5 * h, m2, &mut k3);
    for j in 0..4 {
        tmp[j] = psi[j] + k3[j] * h;
    }
    deriv(model, &tmp, t + h, m2, &mut k4);
    let mut out = [C0; 4];
    for j in 0..4 {
        out[j] = psi[j] + (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
    }
    out
}

/// Exact free-decay propagation of the pair state (no drive, no phonon
/// rates). Each excitation rotates at the frame detuning and decays at γ/2;
/// used for the post-pulse tail where RK4 at the coarse tail step would be
/// unstable for large frame detunings.
#[inline]
fn exact_tail_step4(model: &DriveModel, psi: &[Complex64; 4], h: f64) -> [Complex64; 4] {
    let z = Complex64::new(-0.5 * model.gamma * h, -model.frame_detuning() * h).exp();
    [psi[0], psi[1] * z, psi[2] * z, psi[3] * z * z]
}

fn norm_sqr4(c: &[Complex64; 4]) -> f64 {
    c.iter().map(|x| x.norm_sqr()).sum()
}

/// Jump channels of the pair system.
#[derive(Clone, Copy)]
enum PairChannel {
    DPlus,
    DMinus,
    Deph1,
    Deph2,
    Raise1,
    Raise2,
}

fn apply_pair_channel(k: PairChannel, c: &[Complex64; 4]) -> [Complex64; 4] {
    match k {
        PairChannel::DPlus => [c[2] + c[1], c[3], c[3], C0],
        PairChannel::DMinus => [c[2] - c[1], c[3], -c[3], C0],
        PairChannel::Deph1 => [C0, C0, c[2], c[3]],
        PairChannel::Deph2 => [C0, c[1], C0, c[3]],
        PairChannel::Raise1 => [C0, C0, c[0], c[1]],
        PairChannel::Raise2 => [C0, c[0], C0, c[2]],
    }
}

/// Run one joint trajectory; returns the clicks at each beam-splitter output.
pub fn run_hom_trajectory(
    model: &DriveModel,
    cfg: &HomConfig,
    rng: &mut ChaCha8Rng,
) -> Result<HomTrajectory> {
    let m2 = if cfg.emitter2_random_phase {
        Complex64::from_polar(cfg.emitter2_scale, rng.gen::<f64>() * 2.0 * PI)
    } else {
        Complex64::new(cfg.emitter2_scale, 0.0)
    };
    let (t_start, t_end) = model.window();
    let dt_pulse = model.recommended_dt();
    let tail_end = model.tail_end();
    let gamma = model.gamma;

    let mut psi = [C0; 4];
    psi[0] = Complex64::new(1.0, 0.0);
    let mut threshold: f64 = rng.gen();
    let mut out = HomTrajectory::default();

    let phases = [
        (t_start, t_end, dt_pulse, false),
        (t_end, tail_end, DT_TAIL, true),
    ];
    for (p_start, p_end, dt, tail) in phases {
        let step = |c: &[Complex64; 4], tt: f64, h: f64| {
            if tail {
                exact_tail_step4(model, c, h)
            } else {
                rk4_step4(model, c, tt, h, m2)
            }
        };
        let mut t = p_start;
        while t < p_end - 1e-12 {
            let h = dt.min(p_end - t);
            let prev_norm = norm_sqr4(&psi);
            let next = step(&psi, t, h);
            let next_norm = norm_sqr4(&next);
            if next_norm > prev_norm * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::Numerical(format!(
                    "HOM trajectory norm increased at t = {t:.3} ps"
                )));
            }
            if next_norm <= threshold {
                let mut ta = t;
                let mut psi_a = psi;
                let mut tb = t + h;
                while tb - ta > h / 10.0 {
                    let tm = 0.5 * (ta + tb);
                    let pm = step(&psi_a, ta, tm - ta);
                    if norm_sqr4(&pm) > threshold {
                        ta = tm;
                        psi_a = pm;
                    } else {
                        tb = tm;
                    }
                }
                let t_jump = 0.5 * (ta + tb);
                let at = step(&psi_a, ta, t_jump - ta);
                let p = model.sample(t_jump);
                let w = [
                    0.5 * gamma * ((at[2] + at[1]).norm_sqr() + 2.0 * at[3].norm_sqr()),
                    0.5 * gamma * ((at[2] - at[1]).norm_sqr() + 2.0 * at[3].norm_sqr()),
                    p.gamma_pd * (at[2].norm_sqr() + at[3].norm_sqr()),
                    p.gamma_pd * (at[1].norm_sqr() + at[3].norm_sqr()),
                    p.gamma_up * (at[0].norm_sqr() + at[1].norm_sqr()),
                    p.gamma_up * (at[0].norm_sqr() + at[2].norm_sqr()),
                ];
                let total: f64 = w.iter().sum();
                if total <= 0.0 {
                    return Err(Error::Numerical(format!(
                        "no jump channel available at t = {t_jump:.3} ps"
                    )));
                }
                let channels = [
                    PairChannel::DPlus,
                    PairChannel::DMinus,
                    PairChannel::Deph1,
                    PairChannel::Deph2,
                    PairChannel::Raise1,
                    PairChannel::Raise2,
                ];
                let mut u: f64 = rng.gen::<f64>() * total;
                let mut chosen = channels.len() - 1;
                for (k, &wk) in w.iter().enumerate() {
                    if u < wk {
                        chosen = k;
                        break;
                    }
                    u -= wk;
                }
                match channels[chosen] {
                    PairChannel::DPlus => out.clicks_plus += 1,
                    PairChannel::DMinus => out.clicks_minus += 1,
                    _ => {}
                }
                let new_state = apply_pair_channel(channels[chosen], &at);
                let norm = norm_sqr4(&new_state).sqrt();
                psi = new_state.map(|x| x / norm);
                threshold = rng.gen();
                let rem = t + h - t_jump;
                if rem > 1e-12 {
                    psi = step(&psi, t_jump, rem);
                }
            } else {
                psi = next;
            }
            t += h;
        }
    }
    Ok(out)
}

/// Interfering-pair coincidence probability P(≥1 D⁺ AND ≥1 D⁻).
pub fn run_hom_pair(
    model: &DriveModel,
    cfg: &HomConfig,
    n_traj: usize,
    master_seed: u64,
) -> Result<Estimate> {
    if n_traj == 0 {
        return Err(Error::Config("n_traj must be positive".into()));
    }
    let outcomes: Vec<Result<HomTrajectory>> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(master_seed, STREAM_HOM, i as u64);
            run_hom_trajectory(model, cfg, &mut rng)
        })
        .collect();
    let mut coincidences = 0usize;
    for o in outcomes {
        let o = o?;
        if o.clicks_plus > 0 && o.clicks_minus > 0 {
            coincidences += 1;
        }
    }
    Ok(binomial_estimate(coincidences, n_traj))
}

/// Distinguishable-reference coincidence probability: two independent
/// single-emitter trajectories, each photon routed to + or − by a fair coin.
pub fn distinguishable_baseline(
    model: &DriveModel,
    n_traj: usize,
    master_seed: u64,
) -> Result<Estimate> {
    let opts = TrajOptions::default();
    let ens_a = run_ensemble(model, n_traj, master_seed, STREAM_TRAJ_PAIR_A, &opts)?;
    let ens_b = run_ensemble(model, n_traj, master_seed, STREAM_TRAJ_PAIR_B, &opts)?;
    let mut coincidences = 0usize;
    for i in 0..n_traj {
        let m = ens_a.records[i].emissions.len() + ens_b.records[i].emissions.len();
        let mut rng = rng_for(master_seed, STREAM_ROUTING ^ 0xD157, i as u64);
        let mut plus = false;
        let mut minus = false;
        for _ in 0..m {
            if rng.gen::<bool>() {
                plus = true;
            } else {
                minus = true;
            }
        }
        if plus && minus {
            coincidences += 1;
        }
    }
    Ok(binomial_estimate(coincidences, n_traj))
}

/// 𝓘 = 1 − p_int/p_dist with first-order error propagation.
pub fn indistinguishability_from_hom(p_int: Estimate, p_dist: Estimate) -> Result<Estimate> {
    if p_dist.value <= 0.0 {
        return Err(Error::Numerical(
            "distinguishable coincidence probability is zero".into(),
        ));
    }
    let value = 1.0 - p_int.value / p_dist.value;
    let se = ((p_int.se / p_dist.value).powi(2)
        + (p_int.value * p_dist.se / (p_dist.value * p_dist.value)).powi(2))
    .sqrt();
    Ok(Estimate::new(value, se))
}
