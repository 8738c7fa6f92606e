//! Recording-to-features pipeline:
//! notch → broadband band-pass → rhythm split → epochs → feature rows.

use rayon::prelude::*;

use crate::dsp::{apply_zero_phase, design_bandpass, design_notch, extract_rhythms, segment_epochs, BandDefinition};
use crate::error::{Error, Result, StageContext};
use crate::eval::EvalError;
use crate::features::{build_feature_matrix, BandEpochs, BandPowerMode, FeatureBuild, FeatureKind, FeatureMatrix};
use crate::ingest::{load_entry, DatasetManifest, EegRecording, ManifestEntry};
use crate::warning::Warning;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineSettings {
    /// `(center_hz, q)`; `None` skips the notch.
    pub notch: Option<(f64, f64)>,
    /// `(lo_hz, hi_hz)`; `None` skips the broadband filter.
    pub bandpass: Option<(f64, f64)>,
    pub order: usize,
    pub bands: Vec<BandDefinition>,
    pub epoch_seconds: f64,
    pub overlap: f64,
    pub features: Vec<FeatureKind>,
    pub band_power_mode: BandPowerMode,
    pub csv_sampling_rate_hz: f64,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings {
            notch: Some((60.0, 30.0)),
            bandpass: Some((0.1, 80.0)),
            order: 4,
            bands: crate::dsp::default_bands(),
            epoch_seconds: 2.0,
            overlap: 0.0,
            features: FeatureKind::ALL.to_vec(),
            band_power_mode: BandPowerMode::Time,
            csv_sampling_rate_hz: 128.0,
        }
    }
}

/// Notch and broadband band-pass, both zero-phase.
pub fn preprocess(rec: &EegRecording, settings: &PipelineSettings) -> Result<(EegRecording, Vec<Warning>)> {
    let fs = rec.sampling_rate_hz();
    let mut warnings = Vec::new();
    let mut data = rec.data().to_vec();
    if let Some((f0, q)) = settings.notch {
        let notch = design_notch(fs, f0, q)?;
        data = data
            .par_iter()
            .map(|ch| apply_zero_phase(&notch, ch))
            .collect::<std::result::Result<_, _>>()?;
    }
    if let Some((lo, hi)) = settings.bandpass {
        let design = design_bandpass(fs, lo, hi, settings.order)?;
        for w in design.warnings {
            warnings.push(Warning::new(w.stage, format!("broadband filter: {}", w.message)));
        }
        data = data
            .par_iter()
            .map(|ch| apply_zero_phase(&design.filter, ch))
            .collect::<std::result::Result<_, _>>()?;
    }
    Ok((rec.with_data(data)?, warnings))
}

/// Preprocess, split into rhythms and cut each rhythm into epochs. The
/// returned bands carry the upper edge actually used.
pub fn band_epochs(rec: &EegRecording, settings: &PipelineSettings) -> Result<(Vec<BandEpochs>, Vec<Warning>)> {
    let (clean, mut warnings) = preprocess(rec, settings)?;
    let rhythms = extract_rhythms(&clean, &settings.bands, settings.order)?;
    warnings.extend(rhythms.warnings);
    let out = rhythms
        .rhythms
        .iter()
        .map(|r| {
            let mut band = r.band.clone();
            band.hi_hz = r.effective_hi_hz;
            BandEpochs {
                epochs: segment_epochs(&r.recording, settings.epoch_seconds, settings.overlap, Some(&band.name)),
                band,
            }
        })
        .collect();
    Ok((out, warnings))
}

/// Feature rows of one recording.
pub fn recording_features(rec: &EegRecording, settings: &PipelineSettings) -> Result<FeatureBuild> {
    let (bands, mut warnings) = band_epochs(rec, settings).stage("dsp")?;
    if bands.first().is_none_or(|b| b.epochs.is_empty()) {
        warnings.push(Warning::new(
            "dsp",
            format!(
                "{} ({}): {:.1} s is shorter than one {} s epoch",
                rec.subject_id(),
                rec.cohort(),
                rec.duration_s(),
                settings.epoch_seconds
            ),
        ));
    }
    let mut build = build_feature_matrix(&bands, rec.channel_names(), &settings.features, settings.band_power_mode)
        .stage("features")?;
    warnings.append(&mut build.warnings);
    build.warnings = warnings;
    Ok(build)
}

fn entry_features(entry: &ManifestEntry, settings: &PipelineSettings) -> Result<(FeatureBuild, Vec<String>)> {
    let where_ = format!("{} ({}, {})", entry.path.display(), entry.subject_id, entry.cohort);
    let (rec, mut warnings) = load_entry(entry, settings.csv_sampling_rate_hz).stage(&format!("ingest {where_}"))?;
    let mut build = recording_features(&rec, settings).map_err(|e| e.in_stage(where_))?;
    warnings.append(&mut build.warnings);
    build.warnings = warnings;
    Ok((build, rec.channel_names().to_vec()))
}

/// Feature matrix over every manifest entry, rows sorted by subject, cohort
/// and epoch. Identical warnings from different recordings are reported once.
pub fn extract_features(manifest: &DatasetManifest, settings: &PipelineSettings) -> Result<FeatureBuild> {
    if manifest.is_empty() {
        return Err(Error::from(EvalError::EmptyDataset).in_stage("ingest"));
    }
    let mut order: Vec<&ManifestEntry> = manifest.entries.iter().collect();
    order.sort_by(|a, b| (&a.subject_id, a.cohort).cmp(&(&b.subject_id, b.cohort)));
    let parts = order
        .par_iter()
        .map(|e| entry_features(e, settings))
        .collect::<Result<Vec<_>>>()?;

    let mut matrix: Option<FeatureMatrix> = None;
    let mut sentinel_cells = Vec::new();
    let mut warnings: Vec<Warning> = Vec::new();
    let mut first_channels: Option<Vec<String>> = None;
    for ((build, channels), entry) in parts.into_iter().zip(&order) {
        match &first_channels {
            None => first_channels = Some(channels),
            Some(c) if *c != channels => {
                return Err(Error::from(crate::features::FeatureError::MisalignedEpochs(format!(
                    "{} has channels {:?}, expected {:?}",
                    entry.path.display(),
                    channels,
                    c
                )))
                .in_stage("features"));
            }
            Some(_) => {}
        }
        for w in build.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        let m = matrix.get_or_insert_with(|| FeatureMatrix::empty(build.matrix.names.clone()));
        let offset = m.n_rows();
        sentinel_cells.extend(build.sentinel_cells.iter().map(|&(r, c)| (r + offset, c)));
        m.data.extend(build.matrix.data);
        m.labels.extend(build.matrix.labels);
        m.groups.extend(build.matrix.groups);
    }
    Ok(FeatureBuild {
        matrix: matrix.unwrap_or_else(|| FeatureMatrix::empty(Vec::new())),
        sentinel_cells,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CohortLabel;

    #[test]
    fn one_recording_column_count() {
        let n = 128 * 8;
        let data: Vec<Vec<f64>> = (0..2)
            .map(|c| (0..n).map(|i| ((i * (c + 3)) as f64 * 0.37).sin() * 10.0).collect())
            .collect();
        let rec = EegRecording::new("s1", CohortLabel::HealthyControl, 128.0, vec!["C3".into(), "C4".into()], data)
            .unwrap();
        let build = recording_features(&rec, &PipelineSettings::default()).unwrap();
        assert_eq!(build.matrix.n_cols(), 5 * 2 * 8);
        assert_eq!(build.matrix.n_rows(), 4);
        assert!(build.matrix.names.iter().any(|n| n == "gamma.C4.rms"));
        assert!(build.warnings.iter().any(|w| w.message.contains("gamma")));
    }
}
