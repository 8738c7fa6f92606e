use serde::{Deserialize, Serialize};

use crate::ingest::{CohortLabel, EegRecording};

/// Fixed-length window of one channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epoch {
    pub subject_id: String,
    pub cohort: CohortLabel,
    pub band: Option<String>,
    pub channel: String,
    /// Position of this window within its channel.
    pub index: usize,
    pub samples: Vec<f64>,
    pub sampling_rate_hz: f64,
}

/// `floor((n - len) / hop) + 1` when the signal holds at least one window.
pub fn expected_epoch_count(n_samples: usize, epoch_len: usize, hop: usize) -> usize {
    if epoch_len == 0 || hop == 0 || n_samples < epoch_len {
        0
    } else {
        (n_samples - epoch_len) / hop + 1
    }
}

/// Window length and hop in samples for the given epoch settings.
pub fn epoch_geometry(sampling_rate_hz: f64, epoch_seconds: f64, overlap_fraction: f64) -> (usize, usize) {
    let len = (epoch_seconds * sampling_rate_hz).round() as usize;
    let hop = ((len as f64) * (1.0 - overlap_fraction)).round().max(1.0) as usize;
    (len, hop)
}

/// Cut every channel into windows of `epoch_seconds`, hop
/// `len × (1 − overlap_fraction)`; a trailing partial window is dropped.
/// Output is channel-major: all epochs of channel 0, then channel 1, ...
pub fn segment_epochs(
    recording: &EegRecording,
    epoch_seconds: f64,
    overlap_fraction: f64,
    band: Option<&str>,
) -> Vec<Epoch> {
    let fs = recording.sampling_rate_hz();
    if !(epoch_seconds > 0.0) || !(0.0..1.0).contains(&overlap_fraction) {
        return Vec::new();
    }
    let (len, hop) = epoch_geometry(fs, epoch_seconds, overlap_fraction);
    let count = expected_epoch_count(recording.n_samples(), len, hop);
    let mut out = Vec::with_capacity(count * recording.n_channels());
    for (name, ch) in recording.channel_names().iter().zip(recording.data()) {
        for e in 0..count {
            let start = e * hop;
            out.push(Epoch {
                subject_id: recording.subject_id().to_string(),
                cohort: recording.cohort(),
                band: band.map(str::to_string),
                channel: name.clone(),
                index: e,
                samples: ch[start..start + len].to_vec(),
                sampling_rate_hz: fs,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize) -> EegRecording {
        let data = vec![(0..n).map(|i| i as f64).collect::<Vec<_>>(); 2];
        EegRecording::new("s1", CohortLabel::HealthyControl, 128.0, vec!["a".into(), "b".into()], data).unwrap()
    }

    #[test]
    fn trailing_partial_window_dropped() {
        let e = segment_epochs(&rec(384), 2.0, 0.0, None);
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].samples.len(), 256);
        assert_eq!(e[0].samples[0], 0.0);
    }

    #[test]
    fn half_overlap() {
        let e = segment_epochs(&rec(512), 2.0, 0.5, Some("beta"));
        assert_eq!(e.len(), 2 * 3);
        assert_eq!(e[1].samples[0], 128.0);
        assert_eq!(e[2].samples[0], 256.0);
        assert_eq!(e[3].channel, "b");
        assert_eq!(e[0].band.as_deref(), Some("beta"));
    }

    #[test]
    fn window_longer_than_signal() {
        assert!(segment_epochs(&rec(100), 2.0, 0.0, None).is_empty());
    }
}
