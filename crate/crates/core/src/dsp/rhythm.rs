use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::filter::{apply_zero_phase, design_bandpass};
use super::DspError;
use crate::ingest::EegRecording;
use crate::warning::Warning;

/// Named frequency band. Edges are kept as given; clamping happens at design time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandDefinition {
    pub name: String,
    pub lo_hz: f64,
    pub hi_hz: f64,
}

impl BandDefinition {
    pub fn new(name: impl Into<String>, lo_hz: f64, hi_hz: f64) -> Self {
        BandDefinition {
            name: name.into(),
            lo_hz,
            hi_hz,
        }
    }
}

/// Delta through gamma, edges verbatim (theta and alpha overlap by 0.9 Hz).
pub fn default_bands() -> Vec<BandDefinition> {
    vec![
        BandDefinition::new("delta", 0.1, 3.9),
        BandDefinition::new("theta", 4.0, 7.9),
        BandDefinition::new("alpha", 7.0, 12.9),
        BandDefinition::new("beta", 13.0, 29.9),
        BandDefinition::new("gamma", 30.0, 80.0),
    ]
}

#[derive(Clone, Debug)]
pub struct Rhythm {
    pub band: BandDefinition,
    /// Upper edge after Nyquist clamping.
    pub effective_hi_hz: f64,
    pub recording: EegRecording,
}

/// Band-limited copies of one recording, in band order.
#[derive(Clone, Debug)]
pub struct RhythmSet {
    pub rhythms: Vec<Rhythm>,
    pub warnings: Vec<Warning>,
}

impl RhythmSet {
    pub fn get(&self, name: &str) -> Option<&EegRecording> {
        self.rhythms
            .iter()
            .find(|r| r.band.name == name)
            .map(|r| &r.recording)
    }

    pub fn names(&self) -> Vec<&str> {
        self.rhythms.iter().map(|r| r.band.name.as_str()).collect()
    }
}

/// Band-pass every channel of `recording` into each band (zero-phase).
pub fn extract_rhythms(
    recording: &EegRecording,
    bands: &[BandDefinition],
    order: usize,
) -> Result<RhythmSet, DspError> {
    let fs = recording.sampling_rate_hz();
    let mut rhythms = Vec::with_capacity(bands.len());
    let mut warnings = Vec::new();
    for band in bands {
        let design = design_bandpass(fs, band.lo_hz, band.hi_hz, order)?;
        for w in design.warnings {
            warnings.push(Warning::new(w.stage, format!("band {}: {}", band.name, w.message)));
        }
        let settle = design.filter.settle_len();
        if recording.n_samples() <= 3 * settle {
            warnings.push(Warning::new(
                "dsp",
                format!(
                    "band {}: {} samples is short for a filter settling over ~{settle} samples",
                    band.name,
                    recording.n_samples()
                ),
            ));
        }
        let data = recording
            .data()
            .par_iter()
            .map(|ch| apply_zero_phase(&design.filter, ch))
            .collect::<Result<Vec<_>, _>>()?;
        rhythms.push(Rhythm {
            band: band.clone(),
            effective_hi_hz: design.hi_hz,
            recording: recording.with_data(data)?,
        });
    }
    Ok(RhythmSet { rhythms, warnings })
}
