//! Simulation core for a waveguide-coupled two-level quantum-dot emitter used
//! as a triggered single-photon source.
//!
//! The crate covers the full pipeline:
//!
//! * [`pulse`] — complex drive envelopes for the off-resonant excitation
//!   schemes (dichromatic, notch-filtered adiabatic rapid passage, SUPER
//!   swing-up), their spectra, and the laser/emission spectral overlap.
//! * [`phonon`] — LA-phonon spectral density and the drive-dependent
//!   weak-coupling rates (pure dephasing, incoherent excitation), polaron
//!   shift and Franck–Condon factor.
//! * [`master`] — deterministic Lindblad master-equation oracle, including
//!   photon-number statistics via counting fields and two-emitter
//!   Hong–Ou–Mandel coincidence probabilities.
//! * [`traj`] — Monte-Carlo wave-function (quantum-jump) unraveling with
//!   deterministic parallel seeding, plus the photon-statistics estimators.
//! * [`hom`] — stochastic two-emitter beam-splitter simulation for the
//!   indistinguishability estimate.
//!
//! Internal units are radians/picosecond for angular frequencies and rates,
//! picoseconds for time. Conversions to table units (meV, K, GHz) live in
//! [`units`].

pub mod drive;
pub mod hom;
pub mod master;
pub mod phonon;
pub mod pulse;
pub mod stats;
pub mod traj;
pub mod units;

/// Errors surfaced by the simulation core.
///
/// `Config` maps to CLI exit code 2 (bad inputs), `Numerical` to exit code 3
/// (integration faults such as trace drift or norm growth).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical fault: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
