//! Read a BDF recording and print its header and per-channel statistics.
//!
//! ```text
//! cargo run --example read_bdf [-- FILE.bdf]
//! ```

use std::path::PathBuf;

use pdeeg::features::{kurtosis, rms};
use pdeeg::ingest::{read_bdf, CohortLabel};

fn main() -> pdeeg::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic/pd01.bdf"));
    let bdf = read_bdf(&path)?;
    println!("{}", path.display());
    println!(
        "  patient {:?}, {} records of {} s, {} Hz",
        bdf.patient_id.trim(),
        bdf.n_records,
        bdf.record_duration_s,
        bdf.sampling_rate_hz
    );
    for w in &bdf.warnings {
        println!("  {w}");
    }
    let rec = bdf.into_recording("pd01", CohortLabel::PdOffMedication)?;
    println!("  {:<8}{:>12}{:>12}", "channel", "rms (uV)", "kurtosis");
    for (name, ch) in rec.channel_names().iter().zip(rec.data()) {
        println!("  {:<8}{:>12.3}{:>12.3}", name, rms(ch)?, kurtosis(ch)?);
    }
    Ok(())
}
