//! Split a recording into the five EEG rhythms and compare time-domain band
//! power with the integral of the periodogram.
//!
//! ```text
//! cargo run --example rhythms_and_band_power
//! ```

use pdeeg::dsp::{default_bands, extract_rhythms, BandDefinition};
use pdeeg::ingest::CohortLabel;
use pdeeg::spectral::{band_power_spectral, band_power_time, power_spectrum};
use pdeeg::synth::{synthetic_recording, SyntheticEegSpec};

fn main() -> pdeeg::Result<()> {
    let spec = SyntheticEegSpec {
        seconds: 16,
        ..SyntheticEegSpec::default()
    };
    for (subject, cohort) in [("hc01", CohortLabel::HealthyControl), ("pd01", CohortLabel::PdOffMedication)] {
        let rec = synthetic_recording(subject, cohort, &spec, 11)?;
        let rhythms = extract_rhythms(&rec, &default_bands(), 4)?;
        println!("{subject} ({cohort}), channel C3");
        println!("  {:<8}{:>14}{:>16}{:>16}", "band", "edges (Hz)", "time (uV^2)", "spectral (uV^2)");
        for r in &rhythms.rhythms {
            let x = &r.recording.data()[0];
            let ps = power_spectrum(x, rec.sampling_rate_hz())?;
            let full = BandDefinition::new("all", 0.0, ps.nyquist_hz());
            println!(
                "  {:<8}{:>14}{:>16.2}{:>16.2}",
                r.band.name,
                format!("{}-{:.2}", r.band.lo_hz, r.effective_hi_hz),
                band_power_time(x)?,
                band_power_spectral(&ps, &full)?
            );
        }
        for w in &rhythms.warnings {
            println!("  {w}");
        }
    }
    Ok(())
}
