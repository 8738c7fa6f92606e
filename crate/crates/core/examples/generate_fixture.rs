//! Regenerate the shipped synthetic dataset.
//!
//! ```text
//! cargo run --example generate_fixture [-- OUT_DIR]
//! ```
//!
//! Ten subjects (five controls, five PD off medication), two channels, 30 s at
//! 128 Hz. The PD cohort carries +6 dB of beta power. The first control is
//! written as CSV, the rest as BDF.

use std::path::PathBuf;

use pdeeg::synth::{write_synthetic_dataset, SyntheticEegSpec};

fn main() -> pdeeg::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic"));
    let spec = SyntheticEegSpec::default();
    let manifest = write_synthetic_dataset(&dir, &spec, 1)?;
    println!("wrote {} recordings; manifest {}", 2 * spec.subjects_per_cohort, manifest.display());
    Ok(())
}
