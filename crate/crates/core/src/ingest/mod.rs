//! Raw recording readers (BioSemi BDF, CSV) and the dataset manifest.
//!
//! Everything returned from this module is an [`EegRecording`] in
//! microvolts with validated shape. Cohort labels come only from the
//! manifest; patient fields inside BDF headers are never consulted.

mod bdf;
mod csv_reader;
mod manifest;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bdf::{decode_i24, encode_i24, read_bdf, write_bdf, BdfData, BdfSignalHeader, BdfWriteOptions};
pub use csv_reader::read_csv_recording;
pub use manifest::{
    load_entry, load_manifest, parse_manifest, DatasetManifest, ManifestEntry, RecordingFormat,
};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed BDF header: {0}")]
    MalformedHeader(String),
    #[error("inconsistent channels: {0}")]
    InconsistentChannels(String),
    #[error("truncated file: expected {expected} bytes, found {actual}")]
    TruncatedFile { expected: u64, actual: u64 },
    #[error("ragged CSV row {row}: expected {expected} columns, found {found}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-numeric CSV cell at row {row} col {col}: {value:?}")]
    NonNumericCell {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("empty file: {}", .0.display())]
    EmptyFile(PathBuf),
    #[error("duplicate manifest entry for subject {subject} ({cohort})")]
    DuplicateSubjectCondition { subject: String, cohort: CohortLabel },
    #[error("duplicate manifest path {}", .0.display())]
    DuplicatePath(PathBuf),
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("unknown cohort tag {0:?} (expected hc, pd_on or pd_off)")]
    UnknownCohortTag(String),
    #[error("unknown recording format {0:?} (expected bdf or csv)")]
    UnknownFormat(String),
    #[error("manifest line {line}: {message}")]
    ManifestSyntax { line: usize, message: String },
    #[error("invalid recording: {0}")]
    InvalidRecording(String),
}

/// Clinical group of a recording.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CohortLabel {
    HealthyControl,
    PdOnMedication,
    PdOffMedication,
}

impl CohortLabel {
    pub const ALL: [CohortLabel; 3] = [
        CohortLabel::HealthyControl,
        CohortLabel::PdOnMedication,
        CohortLabel::PdOffMedication,
    ];

    /// Short tag used in manifests and CSV exports.
    pub fn tag(self) -> &'static str {
        match self {
            CohortLabel::HealthyControl => "hc",
            CohortLabel::PdOnMedication => "pd_on",
            CohortLabel::PdOffMedication => "pd_off",
        }
    }

    pub fn is_pd(self) -> bool {
        !matches!(self, CohortLabel::HealthyControl)
    }
}

impl fmt::Display for CohortLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CohortLabel {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "hc" => Ok(CohortLabel::HealthyControl),
            "pd_on" => Ok(CohortLabel::PdOnMedication),
            "pd_off" => Ok(CohortLabel::PdOffMedication),
            other => Err(IngestError::UnknownCohortTag(other.to_string())),
        }
    }
}

/// Multichannel recording, channel-major, in microvolts.
#[derive(Clone, Debug, PartialEq)]
pub struct EegRecording {
    subject_id: String,
    cohort: CohortLabel,
    sampling_rate_hz: f64,
    channel_names: Vec<String>,
    data: Vec<Vec<f64>>,
}

impl EegRecording {
    pub fn new(
        subject_id: impl Into<String>,
        cohort: CohortLabel,
        sampling_rate_hz: f64,
        channel_names: Vec<String>,
        data: Vec<Vec<f64>>,
    ) -> Result<Self, IngestError> {
        let rec = EegRecording {
            subject_id: subject_id.into(),
            cohort,
            sampling_rate_hz,
            channel_names,
            data,
        };
        rec.validate()?;
        Ok(rec)
    }

    fn validate(&self) -> Result<(), IngestError> {
        let bad = |m: String| Err(IngestError::InvalidRecording(m));
        if !(self.sampling_rate_hz.is_finite() && self.sampling_rate_hz > 0.0) {
            return bad(format!("sampling rate {} is not positive", self.sampling_rate_hz));
        }
        if self.data.is_empty() {
            return bad("recording has no channels".into());
        }
        if self.channel_names.len() != self.data.len() {
            return bad(format!(
                "{} channel names for {} channels",
                self.channel_names.len(),
                self.data.len()
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &self.channel_names {
            if !seen.insert(name.as_str()) {
                return bad(format!("duplicate channel name {name:?}"));
            }
        }
        let n = self.data[0].len();
        for (name, ch) in self.channel_names.iter().zip(&self.data) {
            if ch.len() != n {
                return bad(format!("channel {name:?} has {} samples, expected {n}", ch.len()));
            }
            if let Some(t) = ch.iter().position(|v| !v.is_finite()) {
                return bad(format!("channel {name:?} has non-finite sample at {t}"));
            }
        }
        Ok(())
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn cohort(&self) -> CohortLabel {
        self.cohort
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn data(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        let idx = self.channel_names.iter().position(|c| c == name)?;
        Some(&self.data[idx])
    }

    pub fn n_channels(&self) -> usize {
        self.data.len()
    }

    pub fn n_samples(&self) -> usize {
        self.data[0].len()
    }

    pub fn duration_s(&self) -> f64 {
        self.n_samples() as f64 / self.sampling_rate_hz
    }

    /// Same metadata, new sample matrix (e.g. after filtering).
    pub fn with_data(&self, data: Vec<Vec<f64>>) -> Result<Self, IngestError> {
        EegRecording::new(
            self.subject_id.clone(),
            self.cohort,
            self.sampling_rate_hz,
            self.channel_names.clone(),
            data,
        )
    }

    pub fn into_data(self) -> Vec<Vec<f64>> {
        self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cohort_tags_round_trip() {
        for c in CohortLabel::ALL {
            assert_eq!(c.tag().parse::<CohortLabel>().unwrap(), c);
        }
        assert_eq!("pd_off".parse::<CohortLabel>().unwrap(), CohortLabel::PdOffMedication);
        assert!(matches!(
            "pd".parse::<CohortLabel>(),
            Err(IngestError::UnknownCohortTag(_))
        ));
    }

    #[test]
    fn recording_rejects_bad_shapes() {
        let names = vec!["C3".to_string(), "C4".to_string()];
        let ok = EegRecording::new("s", CohortLabel::HealthyControl, 128.0, names.clone(), vec![vec![0.0; 4]; 2]);
        assert!(ok.is_ok());
        let ragged = EegRecording::new(
            "s",
            CohortLabel::HealthyControl,
            128.0,
            names.clone(),
            vec![vec![0.0; 4], vec![0.0; 3]],
        );
        assert!(ragged.is_err());
        let nan = EegRecording::new(
            "s",
            CohortLabel::HealthyControl,
            128.0,
            names.clone(),
            vec![vec![0.0, f64::NAN], vec![0.0; 2]],
        );
        assert!(nan.is_err());
        let dup = EegRecording::new(
            "s",
            CohortLabel::HealthyControl,
            128.0,
            vec!["C3".into(), "C3".into()],
            vec![vec![0.0; 2]; 2],
        );
        assert!(dup.is_err());
        let rate = EegRecording::new("s", CohortLabel::HealthyControl, 0.0, names, vec![vec![0.0; 2]; 2]);
        assert!(rate.is_err());
    }
}
