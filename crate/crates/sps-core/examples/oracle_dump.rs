//! Development utility: print the deterministic oracle quantities for every
//! preset (pulse diagnostics, phonon-rate peaks, spectral overlap, photon
//! statistics, indistinguishability). Used to cross-check the frozen test
//! values.

use sps_core::drive::DriveModel;
use sps_core::master::{hom_binary_oracle, indistinguishability_raw, photon_statistics};
use sps_core::phonon::{rates_along_pulse, PhononParams};
use sps_core::pulse::{overlap_default, Preset};
use sps_core::units::radps_to_mev;

fn main() {
    let ph = PhononParams::default();
    let args: Vec<String> = std::env::args().collect();
    let only: Option<&str> = args.get(1).map(|s| s.as_str());
    for preset in Preset::ALL {
        if let Some(o) = only {
            if o != preset.name() {
                continue;
            }
        }
        let t0 = std::time::Instant::now();
        let setup = preset.build().unwrap();
        let rates = rates_along_pulse(&setup.drive, &ph);
        let sd = setup.spectrum();
        let overlap = overlap_default(&sd);
        let model = DriveModel::new(&setup.drive, Some(&rates));
        println!(
            "{}: amp_peak={:.4} meV dt={:.2e} ps window=({:.1},{:.1})",
            preset.name(),
            radps_to_mev(setup.drive.max_abs_env()),
            model.recommended_dt(),
            setup.drive.t0,
            setup.drive.t_end()
        );
        println!(
            "  peak gpd={:.4e} rad/ps  peak gup={:.4e} rad/ps  overlap={:.4e}",
            rates.peak_pd(),
            rates.peak_up(),
            overlap
        );
        let stats = photon_statistics(&model).unwrap();
        println!(
            "  P0={:.4} P1={:.4} E[m]={:.4} g2={:.4} maxN={:.4}  ({:.1?})",
            stats.p0,
            stats.p1,
            stats.mean_photons,
            stats.g2,
            stats.max_population,
            t0.elapsed()
        );
        let t1 = std::time::Instant::now();
        let raw = indistinguishability_raw(&model, 500).unwrap();
        println!("  I_raw={:.4} ({:.1?})", raw, t1.elapsed());
        let t2 = std::time::Instant::now();
        let hom = hom_binary_oracle(&model).unwrap();
        println!(
            "  p_int={:.5} p_dist={:.5} I_hom={:.4} ({:.1?})",
            hom.p_int,
            hom.p_dist,
            hom.indist,
            t2.elapsed()
        );
    }
}
