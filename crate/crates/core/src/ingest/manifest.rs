use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{read_bdf, read_csv_recording, CohortLabel, EegRecording, IngestError};
use crate::warning::Warning;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordingFormat {
    Bdf,
    Csv,
}

impl fmt::Display for RecordingFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordingFormat::Bdf => "bdf",
            RecordingFormat::Csv => "csv",
        })
    }
}

impl FromStr for RecordingFormat {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bdf" => Ok(RecordingFormat::Bdf),
            "csv" => Ok(RecordingFormat::Csv),
            other => Err(IngestError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub format: RecordingFormat,
    pub subject_id: String,
    pub cohort: CohortLabel,
}

/// Validated list of recordings. Paths are absolute or relative to the
/// process working directory once loaded.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parse manifest text, collecting every problem rather than stopping at the
/// first. Relative paths are joined onto `base_dir`.
pub fn parse_manifest(
    text: &str,
    base_dir: &Path,
    check_files: bool,
) -> (DatasetManifest, Vec<IngestError>) {
    let mut entries = Vec::new();
    let mut errors = Vec::new();
    let mut keys = HashSet::new();
    let mut paths = HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() != 4 {
            errors.push(IngestError::ManifestSyntax {
                line: line_no,
                message: format!("expected 4 tab-separated fields, found {}", cols.len()),
            });
            continue;
        }
        let format = match cols[1].parse::<RecordingFormat>() {
            Ok(f) => f,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        let cohort = match cols[3].parse::<CohortLabel>() {
            Ok(c) => c,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        let subject_id = cols[2].to_string();
        if subject_id.is_empty() {
            errors.push(IngestError::ManifestSyntax {
                line: line_no,
                message: "empty subject id".into(),
            });
            continue;
        }
        let rel = PathBuf::from(cols[0]);
        let path = if rel.is_absolute() { rel } else { base_dir.join(rel) };

        if !keys.insert((subject_id.clone(), cohort)) {
            errors.push(IngestError::DuplicateSubjectCondition {
                subject: subject_id,
                cohort,
            });
            continue;
        }
        if !paths.insert(path.clone()) {
            errors.push(IngestError::DuplicatePath(path));
            continue;
        }
        if check_files && !path.is_file() {
            errors.push(IngestError::MissingFile(path));
            continue;
        }
        entries.push(ManifestEntry {
            path,
            format,
            subject_id,
            cohort,
        });
    }
    (DatasetManifest { entries }, errors)
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let (manifest, mut errors) = parse_manifest(&text, base, true);
    if errors.is_empty() {
        Ok(manifest)
    } else {
        Err(errors.remove(0))
    }
}

/// Read one manifest entry. `csv_sampling_rate_hz` applies to CSV files,
/// which carry no rate of their own.
pub fn load_entry(
    entry: &ManifestEntry,
    csv_sampling_rate_hz: f64,
) -> Result<(EegRecording, Vec<Warning>), IngestError> {
    match entry.format {
        RecordingFormat::Bdf => {
            let bdf = read_bdf(&entry.path)?;
            let mut warnings = bdf.warnings.clone();
            for w in &mut warnings {
                w.message = format!("{}: {}", entry.path.display(), w.message);
            }
            Ok((bdf.into_recording(entry.subject_id.clone(), entry.cohort)?, warnings))
        }
        RecordingFormat::Csv => Ok((
            read_csv_recording(&entry.path, csv_sampling_rate_hz, entry.cohort, &entry.subject_id)?,
            Vec::new(),
        )),
    }
}
