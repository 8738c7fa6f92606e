//! Filtering, rhythm decomposition and epoch segmentation.

mod epoch;
pub mod filter;
mod rhythm;

pub use epoch::{epoch_geometry, expected_epoch_count, segment_epochs, Epoch};
pub use filter::{
    apply_zero_phase, clamp_band_edge, design_bandpass, design_notch, max_band_edge,
    BandpassDesign, Biquad, BiquadCascade,
};
pub use rhythm::{default_bands, extract_rhythms, BandDefinition, Rhythm, RhythmSet};

use crate::ingest::IngestError;

#[derive(Debug, thiserror::Error)]
pub enum DspError {
    #[error("notch centre {center_hz} Hz is not below Nyquist {nyquist_hz} Hz")]
    CenterAboveNyquist { center_hz: f64, nyquist_hz: f64 },
    #[error("invalid band edges {lo_hz}..{hi_hz} Hz")]
    InvalidBandEdges { lo_hz: f64, hi_hz: f64 },
    #[error("filter order {0} not supported (use 2, 4, 6 or 8)")]
    InvalidOrder(usize),
    #[error("designed filter is unstable: {0}")]
    Unstable(String),
    #[error("empty signal")]
    EmptySignal,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Recording(#[from] IngestError),
}
