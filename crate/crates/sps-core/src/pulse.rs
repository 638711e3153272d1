//! Drive-pulse construction, spectra, and the laser/emission overlap measure.
//!
//! All envelopes are complex Rabi envelopes ε′(t) in rad/ps, defined in a
//! rotating frame. The Hamiltonian convention used by the solvers is
//!
//! ```text
//! H/ħ = frame_detuning·|e⟩⟨e| + ½ (env(t) σ⁺ + conj(env(t)) σ⁻)
//! ```
//!
//! so any time-dependent detuning (e.g. the chirp of adiabatic rapid passage)
//! is carried in the envelope phase. `nominal_detuning(t)` records the
//! instantaneous laser–emitter detuning Δ(t) used by the phonon-rate formulas
//! (it is *not* added to the Hamiltonian).

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

use crate::units::GAMMA_RAD_PS;
use crate::{Error, Result};

/// Default number of grid samples for pulse construction.
pub const DEFAULT_SAMPLES: usize = 1 << 16;
/// Half-width (rad/ps) of the emission band used by the overlap measure.
pub const DEFAULT_EMISSION_BAND: f64 = 1.0;

/// A complex drive envelope sampled on a uniform time grid.
#[derive(Debug, Clone)]
pub struct EnvelopeGrid {
    /// First sample time, ps.
    pub t0: f64,
    /// Sample spacing, ps.
    pub dt: f64,
    /// Complex Rabi envelope ε′(t), rad/ps.
    pub env: Vec<Complex64>,
    /// Constant rotating-frame detuning entering the Hamiltonian, rad/ps.
    pub frame_detuning: f64,
    /// Instantaneous laser–emitter detuning Δ(t) for the phonon-rate model, rad/ps.
    pub nominal_detuning: Vec<f64>,
    /// Human-readable scheme label.
    pub label: String,
}

impl EnvelopeGrid {
    pub fn len(&self) -> usize {
        self.env.len()
    }

    pub fn is_empty(&self) -> bool {
        self.env.is_empty()
    }

    /// Time of sample `i`.
    pub fn t(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    /// Last sample time.
    pub fn t_end(&self) -> f64 {
        self.t(self.len() - 1)
    }

    /// Linear interpolation of the envelope; zero outside the grid.
    pub fn sample_env(&self, t: f64) -> Complex64 {
        match self.frac_index(t) {
            Some((i, f)) => self.env[i] * (1.0 - f) + self.env[i + 1] * f,
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Linear interpolation of the nominal detuning; zero outside the grid.
    pub fn sample_nominal(&self, t: f64) -> f64 {
        match self.frac_index(t) {
            Some((i, f)) => self.nominal_detuning[i] * (1.0 - f) + self.nominal_detuning[i + 1] * f,
            None => 0.0,
        }
    }

    fn frac_index(&self, t: f64) -> Option<(usize, f64)> {
        let x = (t - self.t0) / self.dt;
        if !(0.0..=(self.len() - 1) as f64).contains(&x) {
            return None;
        }
        let i = (x.floor() as usize).min(self.len() - 2);
        Some((i, x - i as f64))
    }

    /// Peak of |ε′(t)| over the grid.
    pub fn max_abs_env(&self) -> f64 {
        self.env.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Trapezoid-rule ∫ env(t) dt (complex pulse area).
    pub fn integral_env(&self) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..self.len() - 1 {
            s += (self.env[i] + self.env[i + 1]) * 0.5;
        }
        s * self.dt
    }

    /// Trapezoid-rule ∫ |env(t)|² dt (envelope energy, rad²/ps).
    pub fn energy(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.len() - 1 {
            s += 0.5 * (self.env[i].norm_sqr() + self.env[i + 1].norm_sqr());
        }
        s * self.dt
    }

    /// Largest amplitude-weighted |dφ/dt| of the envelope phase,
    /// max_t |dφ/dt|·|env(t)|/max|env|. Used by the step-size policy so that
    /// chirps and beat notes are temporally resolved where the envelope
    /// actually drives the emitter; the weighting ignores the (physically
    /// irrelevant) fast phase slips at near-zero envelope nodes.
    pub fn max_phase_gradient(&self) -> f64 {
        let amax = self.max_abs_env();
        if amax == 0.0 {
            return 0.0;
        }
        let thresh = 1e-3 * amax;
        let mut acc = 0.0f64;
        for pair in self.env.windows(2) {
            let a = pair[0].norm().min(pair[1].norm());
            if a > thresh {
                // principal-value phase increment (the step policy keeps
                // |dφ| well below π per sample, so no unwrap state is needed)
                let mut dphi = pair[1].arg() - pair[0].arg();
                while dphi > PI {
                    dphi -= 2.0 * PI;
                }
                while dphi < -PI {
                    dphi += 2.0 * PI;
                }
                acc = acc.max(dphi.abs() / self.dt * (a / amax));
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Scheme parameters
// ---------------------------------------------------------------------------

/// Dichromatic scheme: two identical Gaussian pulses detuned by ±δ whose beat
/// note acts as the effective resonant envelope.
#[derive(Debug, Clone, Serialize)]
pub struct DichromaticParams {
    /// Gaussian duration t_p, ps.
    pub t_p: f64,
    /// Half of the spectral separation, rad/ps.
    pub delta: f64,
    /// Relative phase φ between the two colors, rad.
    pub phi: f64,
    /// Peak amplitude Ω₀, rad/ps. `None` selects the π-area calibration.
    pub amplitude: Option<f64>,
    /// Time window half-width in units of t_p.
    pub window_factor: f64,
    /// Number of grid samples.
    pub n: usize,
}

impl DichromaticParams {
    pub fn new(t_p: f64, delta: f64) -> Self {
        Self {
            t_p,
            delta,
            phi: 0.0,
            amplitude: None,
            window_factor: 8.0,
            n: DEFAULT_SAMPLES,
        }
    }
}

/// Notch-filtered adiabatic rapid passage: chirped Gaussian with a narrow
/// spectral hole cut at the emitter frequency.
#[derive(Debug, Clone, Serialize)]
pub struct NarpParams {
    /// Chirped pulse duration t_p, ps.
    pub t_p: f64,
    /// Chirped peak Rabi amplitude Ω₀, rad/ps.
    pub omega0: f64,
    /// Temporal chirp rate α, ps⁻² (sign as specified; negative = down-chirp).
    pub alpha: f64,
    /// Spectral hole parameter δ (half-width at half depth scale), rad/ps.
    pub delta_hole: f64,
    /// Multiplier on the hole width (robustness scans).
    pub hole_width_factor: f64,
    /// Time window half-width in units of the stretched duration.
    pub window_factor: f64,
    pub n: usize,
}

impl NarpParams {
    pub fn new(t_p: f64, omega0: f64, alpha: f64, delta_hole: f64) -> Self {
        Self {
            t_p,
            omega0,
            alpha,
            delta_hole,
            hole_width_factor: 1.0,
            window_factor: 12.0,
            n: DEFAULT_SAMPLES,
        }
    }

    /// Stretch factor of the chirped pulse relative to its transform limit,
    /// inferred from the chirped duration and chirp rate.
    pub fn stretch(&self) -> f64 {
        (1.0 + self.alpha.powi(2) * self.t_p.powi(4)).sqrt()
    }
}

/// SUPER swing-up scheme: two red-detuned Gaussians whose beat drives the
/// inversion.
#[derive(Debug, Clone, Serialize)]
pub struct SuperParams {
    /// Peak amplitudes, rad/ps.
    pub omega1: f64,
    pub omega2: f64,
    /// Durations, ps.
    pub t_p1: f64,
    pub t_p2: f64,
    /// Red detunings below the emitter, rad/ps (positive numbers).
    pub delta1: f64,
    pub delta2: f64,
    /// Delay of pulse 2 relative to pulse 1, ps.
    pub tau: f64,
    /// Relative phase, rad.
    pub phi: f64,
    pub window_factor: f64,
    pub n: usize,
}

/// Magnitude-consistent second detuning for the swing-up condition:
/// |Δ₂| = Δ₁ + √(Ω₁² + Δ₁²).
pub fn super_detuning_condition(delta1: f64, omega1_peak: f64) -> f64 {
    delta1 + (omega1_peak * omega1_peak + delta1 * delta1).sqrt()
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Peak amplitude giving exactly π effective pulse area for the dichromatic
/// beat envelope: ∫ Ω₀ e^{−t²/2t_p²} cos(δt+φ/2) dt = π.
pub fn calibrate_dichromatic_amplitude(p: &DichromaticParams) -> f64 {
    PI / ((2.0 * PI * p.t_p * p.t_p).sqrt()
        * (0.5 * p.phi).cos()
        * (-0.5 * p.delta * p.delta * p.t_p * p.t_p).exp())
}

fn time_grid(half_width: f64, n: usize) -> (f64, f64, Vec<f64>) {
    // n samples on [-W, W), matching an FFT-friendly endpoint-exclusive grid
    let dt = 2.0 * half_width / n as f64;
    let t0 = -half_width;
    let t: Vec<f64> = (0..n).map(|i| t0 + dt * i as f64).collect();
    (t0, dt, t)
}

/// Build the dichromatic envelope
/// env(t) = Ω₀ e^{−t²/2t_p²} cos(δt + φ/2) e^{−iφ/2}.
pub fn build_dichromatic(p: &DichromaticParams) -> Result<EnvelopeGrid> {
    validate(p.t_p > 0.0, "dichromatic t_p must be positive")?;
    validate(p.delta >= 0.0, "dichromatic delta must be non-negative")?;
    validate(p.n >= 16, "grid must have at least 16 samples")?;
    let om0 = p.amplitude.unwrap_or_else(|| calibrate_dichromatic_amplitude(p));
    let (t0, dt, t) = time_grid(p.window_factor * p.t_p, p.n);
    let phase = Complex64::from_polar(1.0, -0.5 * p.phi);
    let env = t
        .iter()
        .map(|&tt| {
            phase
                * (om0
                    * (-tt * tt / (2.0 * p.t_p * p.t_p)).exp()
                    * (p.delta * tt + 0.5 * p.phi).cos())
        })
        .collect();
    Ok(EnvelopeGrid {
        t0,
        dt,
        env,
        frame_detuning: 0.0,
        nominal_detuning: vec![0.0; p.n],
        label: "dichromatic".into(),
    })
}

/// Build the chirped (ARP) envelope without the spectral hole:
/// env(t) = Ω₀ e^{−t²/2t_p²} e^{−iαt²/2}, frame at the emitter frequency,
/// nominal detuning Δ(t) = −αt.
///
/// The spectral notch of the NARP scheme removes a negligible fraction of the
/// pulse energy but its time-domain complement is a long, weak resonant tail.
/// Driving the emitter with that tail re-excites it after the main inversion
/// and corrupts the photon statistics, so the dynamical drive is the plain
/// chirped pulse; the notch is applied to [`PulseSetup::shaped`], which feeds
/// the exported spectrum and the overlap measure.
pub fn build_arp_drive(p: &NarpParams) -> Result<EnvelopeGrid> {
    validate(p.t_p > 0.0, "narp t_p must be positive")?;
    validate(p.omega0 > 0.0, "narp omega0 must be positive")?;
    validate(p.n >= 16, "grid must have at least 16 samples")?;
    let (t0, dt, t) = time_grid(p.window_factor * p.t_p * p.stretch().max(1.0), p.n);
    let env = t
        .iter()
        .map(|&tt| {
            Complex64::from_polar(
                p.omega0 * (-tt * tt / (2.0 * p.t_p * p.t_p)).exp(),
                -0.5 * p.alpha * tt * tt,
            )
        })
        .collect();
    let nominal = t.iter().map(|&tt| -p.alpha * tt).collect();
    Ok(EnvelopeGrid {
        t0,
        dt,
        env,
        frame_detuning: 0.0,
        nominal_detuning: nominal,
        label: "arp".into(),
    })
}

/// Gauge-equivalent ARP form carrying the chirp as an explicit time-dependent
/// detuning instead of an envelope phase. Returned as (real envelope grid,
/// detuning trace Δ(t) = −αt to be added to the Hamiltonian diagonal). Used to
/// verify gauge invariance of the dynamics.
pub fn build_arp_explicit_detuning(p: &NarpParams) -> Result<(EnvelopeGrid, Vec<f64>)> {
    let mut g = build_arp_drive(p)?;
    let det: Vec<f64> = (0..g.len()).map(|i| -p.alpha * g.t(i)).collect();
    for (i, e) in g.env.iter_mut().enumerate() {
        *e = Complex64::new(e.norm(), 0.0);
        let _ = i;
    }
    Ok((g, det))
}

/// Apply the NARP spectral hole A(ω) = 1 − e^{−ln2·ω²/δ_h²} (ω relative to the
/// emitter frequency) to an envelope via an FFT round trip.
pub fn apply_spectral_hole(grid: &EnvelopeGrid, delta_hole: f64, width_factor: f64) -> EnvelopeGrid {
    let dh = delta_hole * width_factor;
    apply_spectral_mask(grid, |w| {
        Complex64::new(1.0 - (-(2f64.ln()) * w * w / (dh * dh)).exp(), 0.0)
    })
}

/// Multiply the envelope's spectrum (analysis kernel e^{+iωt}) by `mask(ω)`
/// and transform back. ω is measured in the envelope's rotating frame, i.e.
/// relative to the emitter when `frame_detuning == 0`.
pub fn apply_spectral_mask<F>(grid: &EnvelopeGrid, mask: F) -> EnvelopeGrid
where
    F: Fn(f64) -> Complex64,
{
    let n = grid.len();
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    let fft = planner.plan_fft_forward(n);

    // Analysis transform: Ẽ(ω_k) = dt · e^{iω_k t0} · IFFT_unnorm(env)
    let mut buf: Vec<Complex64> = grid.env.clone();
    ifft.process(&mut buf);
    let omegas = fft_angular_frequencies(n, grid.dt);
    for (k, v) in buf.iter_mut().enumerate() {
        let w = omegas[k];
        let phase = Complex64::from_polar(1.0, w * grid.t0);
        *v = *v * grid.dt * phase * mask(w);
    }
    // Synthesis: env_n = (1/(N·dt)) · e^{−iω t0}-corrected forward FFT
    for (k, v) in buf.iter_mut().enumerate() {
        let w = omegas[k];
        *v *= Complex64::from_polar(1.0, -w * grid.t0);
    }
    fft.process(&mut buf);
    let scale = 1.0 / (n as f64 * grid.dt);
    for v in buf.iter_mut() {
        *v *= scale;
    }
    EnvelopeGrid {
        t0: grid.t0,
        dt: grid.dt,
        env: buf,
        frame_detuning: grid.frame_detuning,
        nominal_detuning: grid.nominal_detuning.clone(),
        label: grid.label.clone(),
    }
}

/// Angular FFT frequencies (rad/ps) in FFT bin order for n samples spaced dt.
pub fn fft_angular_frequencies(n: usize, dt: f64) -> Vec<f64> {
    let dw = 2.0 * PI / (n as f64 * dt);
    (0..n)
        .map(|k| {
            if k <= (n - 1) / 2 {
                dw * k as f64
            } else {
                dw * (k as f64 - n as f64)
            }
        })
        .collect()
}

/// Build the SUPER envelope in the frame of laser 1:
/// env(t) = Ω₁e^{−t²/2t₁²} + Ω₂e^{−(t−τ)²/2t₂²}·e^{−i(Δ₁−Δ₂)t}·e^{−iφ},
/// frame_detuning = Δ₁ (emitter sits Δ₁ above laser 1).
pub fn build_super(p: &SuperParams) -> Result<EnvelopeGrid> {
    validate(p.t_p1 > 0.0 && p.t_p2 > 0.0, "super pulse widths must be positive")?;
    validate(p.n >= 16, "grid must have at least 16 samples")?;
    let (t0, dt, t) = time_grid(p.window_factor * p.t_p1.max(p.t_p2), p.n);
    let rel = Complex64::from_polar(1.0, -p.phi);
    let env = t
        .iter()
        .map(|&tt| {
            let e1 = p.omega1 * (-tt * tt / (2.0 * p.t_p1 * p.t_p1)).exp();
            let e2 = p.omega2
                * (-(tt - p.tau) * (tt - p.tau) / (2.0 * p.t_p2 * p.t_p2)).exp();
            Complex64::new(e1, 0.0)
                + rel * e2 * Complex64::from_polar(1.0, -(p.delta1 - p.delta2) * tt)
        })
        .collect();
    Ok(EnvelopeGrid {
        t0,
        dt,
        env,
        frame_detuning: p.delta1,
        nominal_detuning: vec![p.delta1; p.n],
        label: "super".into(),
    })
}

fn validate(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(msg.into()))
    }
}

// ---------------------------------------------------------------------------
// Presets (Table I of the reference results)
// ---------------------------------------------------------------------------

/// Named driving schemes with their published parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Preset {
    LongDichromatic,
    ShortDichromatic,
    Narp,
    Super,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::LongDichromatic,
        Preset::ShortDichromatic,
        Preset::Narp,
        Preset::Super,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::LongDichromatic => "long-dichromatic",
            Preset::ShortDichromatic => "short-dichromatic",
            Preset::Narp => "narp",
            Preset::Super => "super",
        }
    }

    pub fn from_name(s: &str) -> Result<Preset> {
        match s {
            "long-dichromatic" | "long" => Ok(Preset::LongDichromatic),
            "short-dichromatic" | "short" => Ok(Preset::ShortDichromatic),
            "narp" => Ok(Preset::Narp),
            "super" => Ok(Preset::Super),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (expected long-dichromatic, short-dichromatic, narp, super)"
            ))),
        }
    }

    /// Published parameter values for this scheme.
    ///
    /// The dichromatic presets use the π-area calibrated amplitude
    /// (`amplitude: None`); see `calibrate_dichromatic_amplitude`. The quoted
    /// peak amplitudes (0.314 meV long, 7.842 meV short) are ~1/π of the
    /// calibrated values and do not invert the emitter; the calibrated
    /// amplitudes reproduce the reported lossless inversion and figures of
    /// merit.
    pub fn params(&self) -> SchemeParams {
        use crate::units::mev_to_radps as mev;
        match self {
            Preset::LongDichromatic => {
                SchemeParams::Dichromatic(DichromaticParams::new(74.96, mev(0.0263)))
            }
            Preset::ShortDichromatic => {
                SchemeParams::Dichromatic(DichromaticParams::new(3.00, mev(0.6582)))
            }
            Preset::Narp => SchemeParams::Narp(NarpParams::new(
                1.80,
                mev(3.547),
                -1.111,
                mev(0.0053),
            )),
            Preset::Super => SchemeParams::Super(SuperParams {
                omega1: mev(7.785),
                omega2: mev(5.235),
                t_p1: 2.40,
                t_p2: 3.04,
                delta1: mev(8.00),
                delta2: mev(19.163),
                tau: -0.73,
                phi: 0.0,
                window_factor: 12.0,
                n: DEFAULT_SAMPLES,
            }),
        }
    }

    pub fn build(&self) -> Result<PulseSetup> {
        build_setup(&self.params())
    }
}

/// Parameter set for any supported scheme.
#[derive(Debug, Clone, Serialize)]
pub enum SchemeParams {
    Dichromatic(DichromaticParams),
    Narp(NarpParams),
    Super(SuperParams),
}

/// A built pulse: the dynamical drive plus the (possibly notch-filtered)
/// shaped envelope used for spectral quantities.
#[derive(Debug, Clone)]
pub struct PulseSetup {
    pub drive: EnvelopeGrid,
    pub shaped: EnvelopeGrid,
}

impl PulseSetup {
    /// Power spectrum of the shaped pulse on the ω−ω₀ axis.
    pub fn spectrum(&self) -> SpectralDensity {
        pulse_spectrum(&self.shaped)
    }
}

/// Build drive and shaped envelopes for a parameter set.
pub fn build_setup(params: &SchemeParams) -> Result<PulseSetup> {
    match params {
        SchemeParams::Dichromatic(p) => {
            let g = build_dichromatic(p)?;
            Ok(PulseSetup {
                shaped: g.clone(),
                drive: g,
            })
        }
        SchemeParams::Narp(p) => {
            let drive = build_arp_drive(p)?;
            let shaped = apply_spectral_hole(&drive, p.delta_hole, p.hole_width_factor);
            Ok(PulseSetup { drive, shaped })
        }
        SchemeParams::Super(p) => {
            let g = build_super(p)?;
            Ok(PulseSetup {
                shaped: g.clone(),
                drive: g,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Spectrum and overlap
// ---------------------------------------------------------------------------

/// Power spectrum |Ẽ(ω)|² on an axis relative to the emitter frequency ω₀,
/// sorted ascending. `power` carries the raw spectral density (rad²/ps·ps² —
/// arbitrary scale for consumers, which normalize as needed).
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
}

impl SpectralDensity {
    pub fn peak(&self) -> f64 {
        self.power.iter().cloned().fold(0.0, f64::max)
    }

    /// Power at ω (linear interpolation, relative axis).
    pub fn power_at(&self, w: f64) -> f64 {
        if self.omega.is_empty() || w < self.omega[0] || w > *self.omega.last().unwrap() {
            return 0.0;
        }
        let i = match self
            .omega
            .binary_search_by(|x| x.partial_cmp(&w).unwrap())
        {
            Ok(i) => return self.power[i],
            Err(i) => i,
        };
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let f = (w - w0) / (w1 - w0);
        self.power[i - 1] * (1.0 - f) + self.power[i] * f
    }
}

/// Analysis transform Ẽ(ω) = ∫ env(t) e^{+iωt} dt of the envelope, expressed
/// on the absolute ω−ω₀ axis (the frame detuning shifts the axis so all
/// schemes are comparable).
pub fn pulse_spectrum(grid: &EnvelopeGrid) -> SpectralDensity {
    let n = grid.len();
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    let mut buf = grid.env.clone();
    ifft.process(&mut buf);
    let omegas = fft_angular_frequencies(n, grid.dt);
    let mut pairs: Vec<(f64, f64)> = buf
        .iter()
        .zip(omegas.iter())
        .map(|(v, &w)| {
            // phase e^{iωt0} irrelevant for power; magnitude scale dt
            let p = (v * grid.dt).norm_sqr();
            (w - grid.frame_detuning, p)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    SpectralDensity {
        omega: pairs.iter().map(|p| p.0).collect(),
        power: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Spectral overlap 𝒪 between the peak-normalized laser power spectrum and
/// the emission line, modeled as a Lorentzian of FWHM γ centered at ω₀ and
/// restricted to the emission band |ω−ω₀| ≤ `band`:
///
/// 𝒪 = ∫ p̂(ω) S(ω) dω / ∫ S(ω) dω,  p̂ = power / max(power).
///
/// Peak normalization keeps the measure dimensionless in [0, 1]; the
/// Lorentzian weight concentrates the average at the emitter frequency, so 𝒪
/// reports how much *relative* spectral weight the excitation places on the
/// detection band.
pub fn overlap_measure(sd: &SpectralDensity, gamma: f64, band: f64) -> f64 {
    let peak = sd.peak();
    if peak <= 0.0 {
        return 0.0;
    }
    let lorentz = |w: f64| (gamma / (2.0 * PI)) / (w * w + 0.25 * gamma * gamma);
    let mut num = 0.0;
    let mut den = 0.0;
    let idx: Vec<usize> = (0..sd.omega.len())
        .filter(|&i| sd.omega[i].abs() <= band)
        .collect();
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        let dw = sd.omega[j] - sd.omega[i];
        let si = lorentz(sd.omega[i]);
        let sj = lorentz(sd.omega[j]);
        num += 0.5 * (sd.power[i] / peak * si + sd.power[j] / peak * sj) * dw;
        den += 0.5 * (si + sj) * dw;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Overlap with default emission model (radiative FWHM γ, ±1 rad/ps band).
pub fn overlap_default(sd: &SpectralDensity) -> f64 {
    overlap_measure(sd, GAMMA_RAD_PS, DEFAULT_EMISSION_BAND)
}

/// Fraction of envelope energy removed by the spectral hole (diagnostic).
pub fn hole_energy_fraction(unshaped: &EnvelopeGrid, shaped: &EnvelopeGrid) -> f64 {
    let e0 = unshaped.energy();
    if e0 == 0.0 {
        return 0.0;
    }
    1.0 - shaped.energy() / e0
}
