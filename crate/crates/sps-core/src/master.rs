//! Deterministic Lindblad master-equation oracle.
//!
//! The dissipator has three channels:
//!
//! * radiative emission, C₀ = √γ σ⁻ (the waveguide photon channel),
//! * phonon pure dephasing, C₁ = √γ′_eff(t) σ⁺σ⁻,
//! * phonon incoherent excitation, C₂ = √Γ⁺(t) σ⁺.
//!
//! Photon-number statistics are obtained with a counting field: scaling the
//! recycling term γ σ⁻ρσ⁺ of the emission channel by s turns the trace into
//! the probability generating function G(s) = Σ_m P_m s^m (evaluated after
//! the emitter has fully decayed, where G = ρ_gg + s·ρ_ee closes the tail
//! analytically). Fitting G on s ∈ [0,1] yields P₀, P₁ and the factorial
//! moments that define g²(0).
//!
//! Conventions for the figures of merit (recorded here once, used everywhere):
//!
//! * efficiency η = P(exactly one emitted photon) = P₁;
//! * g²(0) = ⟨m(m−1)⟩ / (2⟨m⟩²), i.e. the ordered-pair normalization
//!   ∫∫_{t′>t} G⁽²⁾ dt dt′ / (∫⟨N⟩γdt)²;
//! * indistinguishability: primary definition is the binary Hong–Ou–Mandel
//!   visibility 𝓘 = 1 − p_int/p_dist (see [`hom_binary_oracle`]); the
//!   first-order-coherence ratio ∫∫|G⁽¹⁾|²/(∫γ⟨N⟩)² is also provided as
//!   [`indistinguishability_raw`].

use num_complex::Complex64;

use crate::drive::{DriveModel, DT_TAIL};
use crate::stats::{polyder, polyfit, polyval};
use crate::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2×2 density matrix stored flat as [ρ_gg, ρ_ge, ρ_eg, ρ_ee].
pub type Rho2 = [Complex64; 4];

/// Ground-state density matrix.
pub fn rho_ground() -> Rho2 {
    [Complex64::new(1.0, 0.0), C0, C0, C0]
}

/// Right-hand side of the Lindblad equation for one density matrix, with the
/// emission recycling term scaled by the counting field `s`.
#[inline]
fn lindblad_rhs(
    rho: &Rho2,
    e: Complex64,
    fd: f64,
    gamma: f64,
    gpd: f64,
    gup: f64,
    s: f64,
) -> Rho2 {
    let [pgg, pge, peg, pee] = *rho;
    let hge = 0.5 * e.conj();
    let heg = 0.5 * e;
    let coh_decay = 0.5 * (gamma + gpd + gup);
    [
        -I * (hge * peg - pge * heg) + s * gamma * pee - gup * pgg,
        -I * (hge * pee - pgg * hge - pge * fd) - coh_decay * pge,
        -I * (heg * pgg - pee * heg + fd * peg) - coh_decay * peg,
        -I * (heg * pge - peg * hge) - gamma * pee + gup * pgg,
    ]
}

#[inline]
fn axpy(r: &Rho2, k: &Rho2, a: f64) -> Rho2 {
    [r[0] + k[0] * a, r[1] + k[1] * a, r[2] + k[2] * a, r[3] + k[3] * a]
}

/// Excited-state population trace ⟨N⟩(t).
#[derive(Debug, Clone, Default)]
pub struct PopulationTrace {
    pub t: Vec<f64>,
    pub nx: Vec<f64>,
}

/// Result of a deterministic evolution.
#[derive(Debug, Clone)]
pub struct MeResult {
    pub trace: PopulationTrace,
    pub final_rho: Rho2,
    /// max over recorded points of |Tr ρ − 1|.
    pub trace_drift: f64,
    /// Peak excited-state population.
    pub max_population: f64,
    /// Mean emitted photon number γ∫⟨N⟩dt (tail closed analytically).
    pub mean_photons: f64,
}

/// Integrate the master equation over the pulse window with fixed-step RK4,
/// then append the free-decay tail analytically. `record_stride` thins the
/// stored population trace (1 = every step).
pub fn evolve_me(model: &DriveModel, record_stride: usize) -> Result<MeResult> {
    let (t_start, t_end) = model.window();
    let dt = model.recommended_dt();
    let n_steps = ((t_end - t_start) / dt).ceil() as usize;
    let dt = (t_end - t_start) / n_steps as f64;
    let fd = model.frame_detuning();
    let gamma = model.gamma;

    let mut rho = rho_ground();
    let mut trace = PopulationTrace::default();
    let mut drift = 0.0f64;
    let mut max_pop = 0.0f64;
    let mut eta_int = 0.0f64;
    let mut t = t_start;
    let stride = record_stride.max(1);
    for k in 0..n_steps {
        let rhs = |r: &Rho2, tt: f64| {
            let p = model.sample(tt);
            lindblad_rhs(r, p.env, fd, gamma, p.gamma_pd, p.gamma_up, 1.0)
        };
        let k1 = rhs(&rho, t);
        let k2 = rhs(&axpy(&rho, &k1, 0.5 * dt), t + 0.5 * dt);
        let k3 = rhs(&axpy(&rho, &k2, 0.5 * dt), t + 0.5 * dt);
        let k4 = rhs(&axpy(&rho, &k3, dt), t + dt);
        for i in 0..4 {
            rho[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        t += dt;
        let nx = rho[3].re;
        eta_int += nx * dt;
        max_pop = max_pop.max(nx);
        drift = drift.max(((rho[0] + rho[3]).re - 1.0).abs() + (rho[0] + rho[3]).im.abs());
        if k % stride == 0 {
            trace.t.push(t);
            trace.nx.push(nx);
        }
        if !nx.is_finite() {
            return Err(Error::Numerical(format!(
                "master equation diverged at t = {t:.3} ps"
            )));
        }
    }
    if drift > 1e-8 {
        return Err(Error::Numerical(format!(
            "trace drift {drift:.3e} exceeds 1e-8"
        )));
    }
    // Tail: undriven decay, ⟨N⟩(τ) = ⟨N⟩(T) e^{−γτ}; record a coarse trace.
    let n_final = rho[3].re;
    eta_int += n_final / gamma;
    let tail_end = model.tail_end();
    let mut tau = DT_TAIL * 50.0;
    while t + tau <= tail_end {
        trace.t.push(t + tau);
        trace.nx.push(n_final * (-gamma * tau).exp());
        tau += DT_TAIL * 50.0;
    }
    Ok(MeResult {
        trace,
        final_rho: rho,
        trace_drift: drift,
        max_population: max_pop,
        mean_photons: gamma * eta_int,
    })
}

/// Photon-number statistics of one excitation pulse from the counting-field
/// generating function.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PhotonStatistics {
    /// P(no photon).
    pub p0: f64,
    /// P(exactly one photon) — the efficiency η.
    pub p1: f64,
    /// P(at least one photon).
    pub p_ge1: f64,
    /// Mean photon number ⟨m⟩ = γ∫⟨N⟩dt.
    pub mean_photons: f64,
    /// g²(0) = ⟨m(m−1)⟩ / (2⟨m⟩²) (ordered-pair normalization).
    pub g2: f64,
    /// Generating function at s = ½ (used by the binary HOM baseline).
    pub gf_half: f64,
    /// Peak excited-state population.
    pub max_population: f64,
}

const COUNTING_SVALS: [f64; 7] = [0.0, 1.0 / 6.0, 2.0 / 6.0, 0.5, 4.0 / 6.0, 5.0 / 6.0, 1.0];

/// Evolve a batch of counting-field density matrices (one per s value) and
/// return (G(s) samples, mean photon number, peak population).
pub fn counting_generating_function(model: &DriveModel) -> Result<(Vec<f64>, f64, f64)> {
    let (t_start, t_end) = model.window();
    let dt = model.recommended_dt();
    let n_steps = ((t_end - t_start) / dt).ceil() as usize;
    let dt = (t_end - t_start) / n_steps as f64;
    let fd = model.frame_detuning();
    let gamma = model.gamma;
    let ns = COUNTING_SVALS.len();

    let mut rhos: Vec<Rho2> = vec![rho_ground(); ns];
    let mut eta_int = 0.0f64;
    let mut max_pop = 0.0f64;
    let mut t = t_start;
    for _ in 0..n_steps {
        // Sample the drive once per RK4 stage, shared across the s batch.
        let p1 = model.sample(t);
        let p2 = model.sample(t + 0.5 * dt);
        let p3 = model.sample(t + dt);
        for (b, rho) in rhos.iter_mut().enumerate() {
            let s = COUNTING_SVALS[b];
            let k1 = lindblad_rhs(rho, p1.env, fd, gamma, p1.gamma_pd, p1.gamma_up, s);
            let r2 = axpy(rho, &k1, 0.5 * dt);
            let k2 = lindblad_rhs(&r2, p2.env, fd, gamma, p2.gamma_pd, p2.gamma_up, s);
            let r3 = axpy(rho, &k2, 0.5 * dt);
            let k3 = lindblad_rhs(&r3, p2.env, fd, gamma, p2.gamma_pd, p2.gamma_up, s);
            let r4 = axpy(rho, &k3, dt);
            let k4 = lindblad_rhs(&r4, p3.env, fd, gamma, p3.gamma_pd, p3.gamma_up, s);
            for i in 0..4 {
                rho[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
            }
        }
        t += dt;
        let nx = rhos[ns - 1][3].re; // s = 1 is the physical evolution
        eta_int += nx * dt;
        max_pop = max_pop.max(nx);
        if !nx.is_finite() {
            return Err(Error::Numerical(format!(
                "counting-field evolution diverged at t = {t:.3} ps"
            )));
        }
    }
    // Infinite-tail closure: every remaining excitation emits exactly one
    // photon, so G(s) → ρ_gg + s·ρ_ee.
    let gf: Vec<f64> = rhos
        .iter()
        .zip(COUNTING_SVALS.iter())
        .map(|(r, &s)| r[0].re + s * r[3].re)
        .collect();
    let mean = gamma * eta_int + rhos[ns - 1][3].re;
    Ok((gf, mean, max_pop))
}

/// Full single-emitter photon statistics for a drive model.
pub fn photon_statistics(model: &DriveModel) -> Result<PhotonStatistics> {
    let (gf, mean, max_pop) = counting_generating_function(model)?;
    let coeffs = polyfit(&COUNTING_SVALS, &gf, 6);
    let d1 = polyder(&coeffs);
    let d2 = polyder(&d1);
    let m1 = polyval(&d1, 1.0);
    let m2 = polyval(&d2, 1.0); // ⟨m(m−1)⟩
    let g2 = if m1 > 0.0 { m2 / (2.0 * m1 * m1) } else { 0.0 };
    Ok(PhotonStatistics {
        p0: gf[0],
        p1: coeffs.get(1).copied().unwrap_or(0.0),
        p_ge1: 1.0 - gf[0],
        mean_photons: mean,
        g2,
        gf_half: gf[3],
        max_population: max_pop,
    })
}

/// Binary photon-count generating data needed by the HOM baselines.
pub fn binary_counting(model: &DriveModel) -> Result<(f64, f64)> {
    let (gf, _, _) = counting_generating_function(model)?;
    Ok((gf[0], gf[3])) // (G(0), G(1/2))
}

// ---------------------------------------------------------------------------
// First-order coherence (quantum-regression sweep)
// ---------------------------------------------------------------------------

/// Ratio 𝓘_raw = ∫∫ |G⁽¹⁾(t,t′)|² dt dt′ / (γ∫⟨N⟩dt)² computed by the quantum
/// regression theorem: operators X_t = ρ(t)σ⁺ are spawned on a coarse grid of
/// t and propagated under the same Liouvillian; G⁽¹⁾(t,t′) = Tr[σ⁻ X(t′)].
pub fn indistinguishability_raw(model: &DriveModel, spawn_target: usize) -> Result<f64> {
    let (t_start, t_end) = model.window();
    let dt = model.recommended_dt();
    let n_steps = ((t_end - t_start) / dt).ceil() as usize;
    let dt = (t_end - t_start) / n_steps as f64;
    let fd = model.frame_detuning();
    let gamma = model.gamma;
    let stride = (n_steps / spawn_target.max(1)).max(1);

    // Batch: slot 0 is ρ(t); slots 1.. are the spawned regression operators.
    let mut batch: Vec<Rho2> = vec![rho_ground()];
    let mut spawn_times: Vec<f64> = Vec::new();
    let mut acc: Vec<f64> = Vec::new(); // per-spawn ∫|G1|² dt′ so far
    let mut eta_int = 0.0f64;
    let mut t = t_start;
    for k in 0..n_steps {
        let p1 = model.sample(t);
        let p2 = model.sample(t + 0.5 * dt);
        let p3 = model.sample(t + dt);
        for x in batch.iter_mut() {
            let k1 = lindblad_rhs(x, p1.env, fd, gamma, p1.gamma_pd, p1.gamma_up, 1.0);
            let r2 = axpy(x, &k1, 0.5 * dt);
            let k2 = lindblad_rhs(&r2, p2.env, fd, gamma, p2.gamma_pd, p2.gamma_up, 1.0);
            let r3 = axpy(x, &k2, 0.5 * dt);
            let k3 = lindblad_rhs(&r3, p2.env, fd, gamma, p2.gamma_pd, p2.gamma_up, 1.0);
            let r4 = axpy(x, &k3, dt);
            let k4 = lindblad_rhs(&r4, p3.env, fd, gamma, p3.gamma_pd, p3.gamma_up, 1.0);
            for i in 0..4 {
                x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
            }
        }
        t += dt;
        eta_int += batch[0][3].re * dt;
        if k % stride == 0 {
            // X = ρ(t)·σ⁺  (σ⁺ = |e⟩⟨g|): X = [ρ_ge, 0; ρ_ee, 0]
            // in (g,e) basis → flat [ρ_ge, 0, ρ_ee, 0].
            let r = batch[0];
            batch.push([r[1], C0, r[3], C0]);
            spawn_times.push(t);
            acc.push(0.0);
        }
        // G⁽¹⁾(t_i, t′) = Tr[σ⁻ X] = X_eg
        for (x, a) in batch[1..].iter().zip(acc.iter_mut()) {
            *a += x[2].norm_sqr() * dt;
        }
        if !batch[0][3].re.is_finite() {
            return Err(Error::Numerical(
                "regression sweep diverged".into(),
            ));
        }
    }
    // Tail: undriven decay is exact per step (populations e^{−γτ},
    // coherences e^{−γτ/2}; the frame rotation does not affect |G¹|).
    let dt2 = DT_TAIL * 2.0;
    let n2 = ((model.tail_end() - t) / dt2).ceil() as usize;
    let eg = (-gamma * dt2).exp();
    let eh = (-0.5 * gamma * dt2).exp();
    for k in 0..n2 {
        for x in batch.iter_mut() {
            let pee = x[3] * eg;
            x[0] += x[3] * (1.0 - eg);
            x[3] = pee;
            x[1] *= eh;
            x[2] *= eh;
        }
        t += dt2;
        eta_int += batch[0][3].re * dt2;
        if k % 50 == 0 {
            let r = batch[0];
            batch.push([r[1], C0, r[3], C0]);
            spawn_times.push(t);
            acc.push(0.0);
        }
        for (x, a) in batch[1..].iter().zip(acc.iter_mut()) {
            *a += x[2].norm_sqr() * dt2;
        }
    }
    // Integrate over spawn times (non-uniform central-difference weights).
    let m = spawn_times.len();
    let mut num = 0.0;
    for i in 0..m {
        let w = if i == 0 {
            spawn_times[1] - spawn_times[0]
        } else if i == m - 1 {
            spawn_times[m - 1] - spawn_times[m - 2]
        } else {
            0.5 * (spawn_times[i + 1] - spawn_times[i - 1])
        };
        num += acc[i] * w;
    }
    num *= 2.0; // both time orders
    // Denominator ∫∫⟨N⟩(t)⟨N⟩(t′)dtdt′ = (∫⟨N⟩dt)²; the γ² factors of
    // numerator and denominator cancel.
    Ok(num / (eta_int * eta_int))
}

// ---------------------------------------------------------------------------
// Two-emitter Hong–Ou–Mandel oracle (binary counting fields)
// ---------------------------------------------------------------------------

/// 16×16 complex superoperator acting on vec(ρ) of the two-emitter system
/// (row-major vectorization, basis |q₁q₂⟩ with index 2q₁+q₂).
#[derive(Clone)]
struct Super16(Vec<Complex64>);

impl Super16 {
    fn zeros() -> Self {
        Super16(vec![C0; 256])
    }

    fn add_scaled(&mut self, other: &Super16, a: Complex64) {
        for (x, y) in self.0.iter_mut().zip(other.0.iter()) {
            *x += y * a;
        }
    }

    fn matvec(&self, x: &[Complex64; 16], out: &mut [Complex64; 16]) {
        for r in 0..16 {
            let row = &self.0[r * 16..(r + 1) * 16];
            let mut s = C0;
            for c in 0..16 {
                s += row[c] * x[c];
            }
            out[r] = s;
        }
    }
}

type M4 = [[Complex64; 4]; 4];

fn m4_zeros() -> M4 {
    [[C0; 4]; 4]
}

fn m4_mul(a: &M4, b: &M4) -> M4 {
    let mut c = m4_zeros();
    for i in 0..4 {
        for k in 0..4 {
            if a[i][k] != C0 {
                for j in 0..4 {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

fn m4_dagger(a: &M4) -> M4 {
    let mut c = m4_zeros();
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

/// vec(AρB) = (A ⊗ Bᵀ) vec(ρ) for row-major vec.
fn kron_op(a: &M4, b_t: &M4) -> Super16 {
    let mut s = Super16::zeros();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    // row = i*4+k (component of AρB), col = j*4+l (of ρ)
                    s.0[(i * 4 + k) * 16 + (j * 4 + l)] = a[i][j] * b_t[l][k];
                }
            }
        }
    }
    s
}

fn m4_identity() -> M4 {
    let mut m = m4_zeros();
    for i in 0..4 {
        m[i][i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn lmul(a: &M4) -> Super16 {
    kron_op(a, &m4_identity())
}

fn rmul(b: &M4) -> Super16 {
    // vec(ρB) = (I ⊗ Bᵀ) vec(ρ); kron_op computes a[i][j]·b_t[l][k] with
    // b_t = B meaning B[l][k] = (Bᵀ)[k][l], which is exactly what we need.
    kron_op(&m4_identity(), b)
}

/// Recycling map ρ → CρC†.
fn recycling(c: &M4) -> Super16 {
    kron_op(c, &m4_dagger(c))
}

/// Anticommutator part −½{C†C, ρ} of a dissipator.
fn anticommutator(c: &M4) -> Super16 {
    let cdc = m4_mul(&m4_dagger(c), c);
    let mut s = lmul(&cdc);
    let r = rmul(&cdc);
    s.add_scaled(&r, Complex64::new(1.0, 0.0));
    let mut out = Super16::zeros();
    out.add_scaled(&s, Complex64::new(-0.5, 0.0));
    out
}

/// Full dissipator D[C]ρ = CρC† − ½{C†C, ρ}.
fn dissipator(c: &M4) -> Super16 {
    let mut s = recycling(c);
    let a = anticommutator(c);
    s.add_scaled(&a, Complex64::new(1.0, 0.0));
    s
}

struct TwoEmitterOps {
    /// Constant decay part: beam-splitter-channel anticommutators.
    a_const: Super16,
    /// Frame-detuning commutator −i[H_fd, ·]. Kept separate so the free-decay
    /// tail can omit it: it only phase-rotates coherences (irrelevant to the
    /// counting trace) but is stiff on the coarse tail step when fd is large.
    a_fd: Super16,
    /// Coefficient of env(t).
    a_env: Super16,
    /// Coefficient of conj(env(t)).
    a_env_conj: Super16,
    /// Coefficient of γ′_eff(t).
    a_deph: Super16,
    /// Coefficient of Γ⁺(t).
    a_raise: Super16,
    /// Recycling superoperators of the beam-splitter outputs D±.
    recyc_plus: Super16,
    recyc_minus: Super16,
}

fn two_emitter_ops(gamma: f64, fd: f64) -> TwoEmitterOps {
    let one = Complex64::new(1.0, 0.0);
    // Single-emitter operators embedded in the pair space (index 2q₁+q₂).
    let mut sm1 = m4_zeros(); // σ₁⁻: |e·⟩→|g·⟩  (2→0, 3→1)
    sm1[0][2] = one;
    sm1[1][3] = one;
    let mut sm2 = m4_zeros(); // σ₂⁻ (1→0, 3→2)
    sm2[0][1] = one;
    sm2[2][3] = one;
    let sp1 = m4_dagger(&sm1);
    let sp2 = m4_dagger(&sm2);
    let n1 = m4_mul(&sp1, &sm1);
    let n2 = m4_mul(&sp2, &sm2);

    // Beam-splitter outputs D± = √(γ/2)(σ₁⁻ ± σ₂⁻).
    let c = Complex64::new((0.5 * gamma).sqrt(), 0.0);
    let mut dp = m4_zeros();
    let mut dm = m4_zeros();
    for i in 0..4 {
        for j in 0..4 {
            dp[i][j] = c * (sm1[i][j] + sm2[i][j]);
            dm[i][j] = c * (sm1[i][j] - sm2[i][j]);
        }
    }

    // H_drive = ½ env (σ₁⁺+σ₂⁺) + h.c.; split into env and conj(env) parts.
    let mut sp_sum = m4_zeros();
    let mut sm_sum = m4_zeros();
    for i in 0..4 {
        for j in 0..4 {
            sp_sum[i][j] = sp1[i][j] + sp2[i][j];
            sm_sum[i][j] = sm1[i][j] + sm2[i][j];
        }
    }
    let mi_half = Complex64::new(0.0, -0.5);
    let mut a_env = Super16::zeros();
    a_env.add_scaled(&lmul(&sp_sum), mi_half);
    a_env.add_scaled(&rmul(&sp_sum), -mi_half);
    let mut a_env_conj = Super16::zeros();
    a_env_conj.add_scaled(&lmul(&sm_sum), mi_half);
    a_env_conj.add_scaled(&rmul(&sm_sum), -mi_half);

    // Frame-detuning commutator −i[H_fd, ·].
    let mut hd = m4_zeros();
    hd[1][1] = Complex64::new(fd, 0.0);
    hd[2][2] = Complex64::new(fd, 0.0);
    hd[3][3] = Complex64::new(2.0 * fd, 0.0);
    let mi = Complex64::new(0.0, -1.0);
    let mut a_fd = Super16::zeros();
    a_fd.add_scaled(&lmul(&hd), mi);
    a_fd.add_scaled(&rmul(&hd), -mi);
    // Constant decay part: anticommutators of D±.
    let mut a_const = Super16::zeros();
    a_const.add_scaled(&anticommutator(&dp), one);
    a_const.add_scaled(&anticommutator(&dm), one);

    // Phonon channels act on each emitter separately (full dissipators).
    let mut a_deph = dissipator(&n1);
    a_deph.add_scaled(&dissipator(&n2), one);
    let mut a_raise = dissipator(&sp1);
    a_raise.add_scaled(&dissipator(&sp2), one);

    TwoEmitterOps {
        a_const,
        a_fd,
        a_env,
        a_env_conj,
        a_deph,
        a_raise,
        recyc_plus: recycling(&dp),
        recyc_minus: recycling(&dm),
    }
}

/// Result of the deterministic two-emitter HOM computation.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HomOracle {
    /// P(≥1 photon in D⁺ AND ≥1 in D⁻) for two interfering emitters.
    pub p_int: f64,
    /// Same probability for distinguishable photons (independent emitters,
    /// classical 50/50 routing), from the single-emitter generating function.
    pub p_dist: f64,
    /// 𝓘 = 1 − p_int/p_dist.
    pub indist: f64,
}

/// Deterministic binary-HOM indistinguishability.
///
/// The joint generating function G(s₊, s₋) (recycling of D± scaled by s±) is
/// evaluated at the three corners needed for the binary coincidence
/// probability p_int = 1 − G(0,1) − G(1,0) + G(0,0). The distinguishable
/// baseline uses two independent copies of the single-emitter generating
/// function with fair-coin routing: p_dist = 1 − 2G(½)² + G(0)².
pub fn hom_binary_oracle(model: &DriveModel) -> Result<HomOracle> {
    let (t_start, t_end) = model.window();
    let dt = model.recommended_dt();
    let n_steps = ((t_end - t_start) / dt).ceil() as usize;
    let dt = (t_end - t_start) / n_steps as f64;
    let gamma = model.gamma;
    let ops = two_emitter_ops(gamma, model.frame_detuning());

    // Batches (s₊, s₋): (0,0), (0,1), (1,0).
    let corners = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)];
    let mut states: Vec<[Complex64; 16]> = corners
        .iter()
        .map(|_| {
            let mut v = [C0; 16];
            v[0] = Complex64::new(1.0, 0.0); // |gg⟩⟨gg|
            v
        })
        .collect();

    let mut lt = Super16::zeros();
    let stage = |states: &[[Complex64; 16]],
                 lt: &Super16,
                 out: &mut Vec<[Complex64; 16]>| {
        for (b, x) in states.iter().enumerate() {
            let (sp, sm) = corners[b];
            let mut y = [C0; 16];
            lt.matvec(x, &mut y);
            let mut rp = [C0; 16];
            ops.recyc_plus.matvec(x, &mut rp);
            let mut rm = [C0; 16];
            ops.recyc_minus.matvec(x, &mut rm);
            for i in 0..16 {
                y[i] += rp[i] * sp + rm[i] * sm;
            }
            out[b] = y;
        }
    };

    let assemble = |lt: &mut Super16, p: &crate::drive::DrivePoint, with_fd: bool| {
        lt.0.copy_from_slice(&ops.a_const.0);
        if with_fd {
            lt.add_scaled(&ops.a_fd, Complex64::new(1.0, 0.0));
        }
        lt.add_scaled(&ops.a_env, p.env);
        lt.add_scaled(&ops.a_env_conj, p.env.conj());
        lt.add_scaled(&ops.a_deph, Complex64::new(p.gamma_pd, 0.0));
        lt.add_scaled(&ops.a_raise, Complex64::new(p.gamma_up, 0.0));
    };

    let mut t = t_start;
    let nb = states.len();
    let mut k1 = vec![[C0; 16]; nb];
    let mut k2 = vec![[C0; 16]; nb];
    let mut k3 = vec![[C0; 16]; nb];
    let mut k4 = vec![[C0; 16]; nb];
    let mut tmp = vec![[C0; 16]; nb];
    // Integrate the pulse window, then the free-decay tail on a coarse step.
    // The tail Liouvillian drops the frame-detuning commutator (see a_fd):
    // after the drive it only rotates coherence phases, which never feed back
    // into the counting trace, while its large eigenvalues would destabilise
    // RK4 at the coarse tail step.
    let tail_steps = ((model.tail_end() - t_end) / DT_TAIL).ceil() as usize;
    let phases: [(usize, f64, bool); 2] = [(n_steps, dt, true), (tail_steps, DT_TAIL, false)];
    for (nsteps_p, dtp, with_fd) in phases {
        for _ in 0..nsteps_p {
            assemble(&mut lt, &model.sample(t), with_fd);
            stage(&states, &lt, &mut k1);
            for b in 0..nb {
                for i in 0..16 {
                    tmp[b][i] = states[b][i] + k1[b][i] * (0.5 * dtp);
                }
            }
            assemble(&mut lt, &model.sample(t + 0.5 * dtp), with_fd);
            stage(&tmp, &lt, &mut k2);
            for b in 0..nb {
                for i in 0..16 {
                    tmp[b][i] = states[b][i] + k2[b][i] * (0.5 * dtp);
                }
            }
            stage(&tmp, &lt, &mut k3);
            for b in 0..nb {
                for i in 0..16 {
                    tmp[b][i] = states[b][i] + k3[b][i] * dtp;
                }
            }
            assemble(&mut lt, &model.sample(t + dtp), with_fd);
            stage(&tmp, &lt, &mut k4);
            for b in 0..nb {
                for i in 0..16 {
                    states[b][i] +=
                        (k1[b][i] + (k2[b][i] + k3[b][i]) * 2.0 + k4[b][i]) * (dtp / 6.0);
                }
            }
            t += dtp;
        }
    }
    let trace = |v: &[Complex64; 16]| (v[0] + v[5] + v[10] + v[15]).re;
    let g00 = trace(&states[0]);
    let g01 = trace(&states[1]);
    let g10 = trace(&states[2]);
    let p_int = 1.0 - g01 - g10 + g00;
    if !p_int.is_finite() {
        return Err(Error::Numerical("HOM oracle diverged".into()));
    }
    let (g0, gh) = binary_counting(model)?;
    let p_dist = 1.0 - 2.0 * gh * gh + g0 * g0;
    Ok(HomOracle {
        p_int,
        p_dist,
        indist: 1.0 - p_int / p_dist,
    })
}
