//! Synthesized mid-node vibration signal, its spectrum and the band RMS.
//!
//! ```text
//! cargo run --example vibration_spectrum
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spokeforge::evaluator::{
    band_rms, fft_magnitudes, proxy_evaluate_detailed, synthesize_vibration_signal, ProxyCalibration,
};
use spokeforge::geometry::{base_profile, generate_profile, DesignGenotype};

fn main() -> spokeforge::Result<()> {
    let base = base_profile();
    let calibration = ProxyCalibration::from_base(&base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let other = loop {
        if let Ok(g) = generate_profile(&base, &DesignGenotype::sample(&mut rng)) {
            break g.profile;
        }
    };

    for (label, profile) in [("base", &base), ("random design", &other)] {
        let signal = synthesize_vibration_signal(profile, &calibration)?;
        let spectrum = fft_magnitudes(&signal);
        let eval = proxy_evaluate_detailed(profile, &calibration)?;
        println!(
            "{label}: {} samples at {} Hz, resolution {:.4} Hz, natural frequency {:.1} Hz",
            signal.len(),
            signal.sample_rate(),
            spectrum.resolution(),
            eval.natural_frequency_hz
        );

        let mut bins: Vec<usize> = (1..spectrum.magnitudes.len()).collect();
        bins.sort_by(|&a, &b| spectrum.magnitudes[b].total_cmp(&spectrum.magnitudes[a]));
        for &k in bins.iter().take(5) {
            println!("  {:>8.2} Hz  {:.5}", spectrum.frequencies[k], spectrum.magnitudes[k]);
        }
        println!(
            "  band RMS 100-470 Hz {:.5}  calibrated vib_rms {:.4}\n",
            band_rms(&spectrum, 100.0, 470.0)?,
            eval.record.vib_rms
        );
    }
    Ok(())
}
