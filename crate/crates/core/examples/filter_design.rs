//! Design the mains notch and a band-pass, print their magnitude responses
//! and check them on pure tones.
//!
//! ```text
//! cargo run --example filter_design
//! ```

use std::f64::consts::TAU;

use pdeeg::dsp::{apply_zero_phase, design_bandpass, design_notch};

fn tone(f: f64, fs: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (TAU * f * i as f64 / fs).sin()).collect()
}

fn central_rms(x: &[f64]) -> f64 {
    let c = &x[x.len() / 4..3 * x.len() / 4];
    (c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64).sqrt()
}

fn main() -> pdeeg::Result<()> {
    let fs = 128.0;
    let notch = design_notch(fs, 60.0, 30.0)?;
    let alpha = design_bandpass(fs, 8.0, 12.0, 4)?;

    println!("{:>8}{:>14}{:>14}", "f (Hz)", "notch (dB)", "8-12 Hz (dB)");
    for f in [1.0, 5.0, 8.0, 10.0, 12.0, 20.0, 40.0, 58.0, 60.0, 62.0] {
        let db = |m: f64| 20.0 * m.max(1e-300).log10();
        println!("{f:>8.1}{:>14.2}{:>14.2}", db(notch.magnitude(f, fs)), db(alpha.filter.magnitude(f, fs)));
    }

    let n = 4096;
    let hum = tone(60.0, fs, n);
    let out = apply_zero_phase(&notch, &hum)?;
    println!(
        "\n60 Hz tone after zero-phase notch: {:.1} dB",
        20.0 * (central_rms(&out) / central_rms(&hum)).log10()
    );
    for f in [10.0, 1.0] {
        let x = tone(f, fs, n);
        let y = apply_zero_phase(&alpha.filter, &x)?;
        println!(
            "{f} Hz tone after zero-phase 8-12 Hz band-pass: {:.2} dB",
            20.0 * (central_rms(&y) / central_rms(&x)).log10()
        );
    }

    let gamma = design_bandpass(fs, 30.0, 80.0, 4)?;
    for w in &gamma.warnings {
        println!("\n{w}");
    }
    Ok(())
}
