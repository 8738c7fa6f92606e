use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::scalar::{self, ZERO_VARIANCE_EPS};
use super::{BandPowerMode, FeatureError, FeatureKind};
use crate::dsp::{BandDefinition, Epoch};
use crate::ingest::CohortLabel;
use crate::spectral::{band_power_spectral, band_power_time, log_band_power, power_spectrum};
use crate::warning::Warning;

/// One row of features with its column names.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub names: Vec<String>,
    pub subject_id: String,
    pub cohort: CohortLabel,
}

/// Rectangular feature table; one row per (subject, cohort, epoch index).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    pub names: Vec<String>,
    pub data: Vec<Vec<f64>>,
    pub labels: Vec<CohortLabel>,
    pub groups: Vec<String>,
}

impl FeatureMatrix {
    pub fn empty(names: Vec<String>) -> Self {
        FeatureMatrix {
            names,
            data: Vec::new(),
            labels: Vec::new(),
            groups: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.data.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> FeatureVector {
        FeatureVector {
            values: self.data[i].clone(),
            names: self.names.clone(),
            subject_id: self.groups[i].clone(),
            cohort: self.labels[i],
        }
    }

    pub fn push(&mut self, row: FeatureVector) -> Result<(), FeatureError> {
        if row.names != self.names {
            return Err(FeatureError::ColumnMismatch("row names differ from matrix columns".into()));
        }
        self.data.push(row.values);
        self.labels.push(row.cohort);
        self.groups.push(row.subject_id);
        Ok(())
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            names: self.names.clone(),
            data: rows.iter().map(|&i| self.data[i].clone()).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            groups: rows.iter().map(|&i| self.groups[i].clone()).collect(),
        }
    }

    pub fn distinct_labels(&self) -> Vec<CohortLabel> {
        let mut l = self.labels.clone();
        l.sort();
        l.dedup();
        l
    }

    /// CSV with a header of column names followed by `label` and `subject`.
    /// Values use the shortest round-trip decimal form.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        header.push("label");
        header.push("subject");
        out.push_str(&header.join(","));
        out.push('\n');
        for ((row, label), group) in self.data.iter().zip(&self.labels).zip(&self.groups) {
            for v in row {
                out.push_str(&format!("{v:?},"));
            }
            out.push_str(label.tag());
            out.push(',');
            out.push_str(group);
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), FeatureError> {
        let io = |source| FeatureError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut f = std::fs::File::create(path).map_err(io)?;
        f.write_all(self.to_csv_string().as_bytes()).map_err(io)
    }

    pub fn from_csv_str(text: &str) -> Result<FeatureMatrix, FeatureError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| FeatureError::MalformedCsv(e.to_string()))?
            .clone();
        let n = headers.len();
        if n < 2 || &headers[n - 2] != "label" || &headers[n - 1] != "subject" {
            return Err(FeatureError::MalformedCsv("header must end with label,subject".into()));
        }
        let mut m = FeatureMatrix::empty(headers.iter().take(n - 2).map(str::to_string).collect());
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| FeatureError::MalformedCsv(e.to_string()))?;
            let values = rec
                .iter()
                .take(n - 2)
                .map(|c| c.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| FeatureError::MalformedCsv(format!("row {}: {e}", i + 1)))?;
            let cohort = rec[n - 2]
                .parse::<CohortLabel>()
                .map_err(|e| FeatureError::MalformedCsv(format!("row {}: {e}", i + 1)))?;
            m.data.push(values);
            m.labels.push(cohort);
            m.groups.push(rec[n - 1].to_string());
        }
        Ok(m)
    }

    pub fn read_csv(path: &Path) -> Result<FeatureMatrix, FeatureError> {
        let text = std::fs::read_to_string(path).map_err(|source| FeatureError::Io {
            path: path.display().to_string(),
            source,
        })?;
        FeatureMatrix::from_csv_str(&text)
    }
}

/// Epochs of one band, with the band edges actually applied.
#[derive(Clone, Debug)]
pub struct BandEpochs {
    pub band: BandDefinition,
    pub epochs: Vec<Epoch>,
}

#[derive(Clone, Debug)]
pub struct FeatureBuild {
    pub matrix: FeatureMatrix,
    /// (row, column) cells where kurtosis was undefined and set to 0.
    pub sentinel_cells: Vec<(usize, usize)>,
    pub warnings: Vec<Warning>,
}

type RowKey = (String, CohortLabel, usize);

/// Assemble the feature matrix. Columns are `<band>.<channel>.<feature>` in
/// band, channel, feature order; rows are sorted by subject, cohort, epoch.
///
/// `channels` fixes the column order; when empty it is taken from the order
/// of first appearance in the first band.
pub fn build_feature_matrix(
    band_epochs: &[BandEpochs],
    channels: &[String],
    features: &[FeatureKind],
    mode: BandPowerMode,
) -> Result<FeatureBuild, FeatureError> {
    let mut channels: Vec<String> = channels.to_vec();
    if channels.is_empty() {
        if let Some(first) = band_epochs.first() {
            for e in &first.epochs {
                if !channels.contains(&e.channel) {
                    channels.push(e.channel.clone());
                }
            }
        }
    }
    let mut names = Vec::with_capacity(band_epochs.len() * channels.len() * features.len());
    for b in band_epochs {
        for ch in &channels {
            for f in features {
                names.push(format!("{}.{}.{}", b.band.name, ch, f.name()));
            }
        }
    }

    // index: row key -> per band -> per channel epoch
    let mut rows: BTreeMap<RowKey, Vec<Vec<Option<&Epoch>>>> = BTreeMap::new();
    for (bi, b) in band_epochs.iter().enumerate() {
        for e in &b.epochs {
            let ci = channels.iter().position(|c| c == &e.channel).ok_or_else(|| {
                FeatureError::MisalignedEpochs(format!(
                    "channel {:?} in band {} is not among the matrix channels",
                    e.channel, b.band.name
                ))
            })?;
            let slot = rows
                .entry((e.subject_id.clone(), e.cohort, e.index))
                .or_insert_with(|| vec![vec![None; channels.len()]; band_epochs.len()]);
            if slot[bi][ci].replace(e).is_some() {
                return Err(FeatureError::MisalignedEpochs(format!(
                    "duplicate epoch {} of {}/{} in band {}",
                    e.index, e.subject_id, e.channel, b.band.name
                )));
            }
        }
    }
    for ((subject, cohort, idx), slot) in &rows {
        for (bi, per_ch) in slot.iter().enumerate() {
            if let Some(ci) = per_ch.iter().position(Option::is_none) {
                return Err(FeatureError::MisalignedEpochs(format!(
                    "band {} lacks epoch {idx} of {subject} ({cohort}) channel {}",
                    band_epochs[bi].band.name, channels[ci]
                )));
            }
        }
    }

    let keyed: Vec<(&RowKey, &Vec<Vec<Option<&Epoch>>>)> = rows.iter().collect();
    let computed = keyed
        .par_iter()
        .map(|(_, slot)| {
            let mut values = Vec::with_capacity(names.len());
            let mut sentinels = Vec::new();
            for (bi, per_ch) in slot.iter().enumerate() {
                for e in per_ch.iter().flatten() {
                    let bp = band_power(e, &band_epochs[bi].band, mode)?;
                    for f in features {
                        let v = match f {
                            FeatureKind::BandPower => bp,
                            FeatureKind::LogBandPower => log_band_power(bp),
                            FeatureKind::Std => scalar::std_dev(&e.samples)?,
                            FeatureKind::Kurtosis => {
                                if scalar::std_dev(&e.samples)? <= ZERO_VARIANCE_EPS {
                                    sentinels.push(values.len());
                                    0.0
                                } else {
                                    scalar::kurtosis(&e.samples)?
                                }
                            }
                            FeatureKind::Variance => scalar::variance(&e.samples)?,
                            FeatureKind::Norm => scalar::l2_norm(&e.samples)?,
                            FeatureKind::AvgEnergy => scalar::average_energy(&e.samples)?,
                            FeatureKind::Rms => scalar::rms(&e.samples)?,
                        };
                        values.push(v);
                    }
                }
            }
            Ok((values, sentinels))
        })
        .collect::<Result<Vec<_>, FeatureError>>()?;

    let mut matrix = FeatureMatrix::empty(names);
    let mut sentinel_cells = Vec::new();
    let mut warnings = Vec::new();
    for (r, (((subject, cohort, idx), _), (values, sentinels))) in
        keyed.iter().zip(computed).enumerate()
    {
        for &c in &sentinels {
            sentinel_cells.push((r, c));
            warnings.push(Warning::new(
                "features",
                format!(
                    "constant signal in {} epoch {idx} ({}): kurtosis set to 0",
                    subject, matrix.names[c]
                ),
            ));
        }
        matrix.data.push(values);
        matrix.labels.push(*cohort);
        matrix.groups.push(subject.clone());
    }
    Ok(FeatureBuild {
        matrix,
        sentinel_cells,
        warnings,
    })
}

fn band_power(e: &Epoch, band: &BandDefinition, mode: BandPowerMode) -> Result<f64, FeatureError> {
    Ok(match mode {
        BandPowerMode::Time => band_power_time(&e.samples)?,
        BandPowerMode::Spectral => {
            let ps = power_spectrum(&e.samples, e.sampling_rate_hz)?;
            let nyq = ps.nyquist_hz();
            let clipped = BandDefinition::new(band.name.clone(), band.lo_hz.min(nyq), band.hi_hz.min(nyq));
            band_power_spectral(&ps, &clipped)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn epoch(subject: &str, ch: &str, idx: usize, samples: Vec<f64>) -> Epoch {
        Epoch {
            subject_id: subject.into(),
            cohort: CohortLabel::HealthyControl,
            band: Some("b".into()),
            channel: ch.into(),
            index: idx,
            samples,
            sampling_rate_hz: 128.0,
        }
    }

    #[test]
    fn single_feature_three_epochs() {
        let epochs = (0..3).map(|i| epoch("s", "C3", i, vec![i as f64 + 1.0; 16])).collect();
        let b = BandEpochs {
            band: BandDefinition::new("alpha", 7.0, 12.9),
            epochs,
        };
        let out = build_feature_matrix(&[b], &[], &[FeatureKind::Rms], BandPowerMode::Time).unwrap();
        assert_eq!(out.matrix.names, ["alpha.C3.rms"]);
        assert_eq!(out.matrix.data, [vec![1.0], vec![2.0], vec![3.0]]);
    }

    #[test]
    fn constant_epoch_kurtosis_sentinel() {
        let b = BandEpochs {
            band: BandDefinition::new("alpha", 7.0, 12.9),
            epochs: vec![epoch("s", "C3", 0, vec![2.0; 16])],
        };
        let out = build_feature_matrix(&[b], &[], &[FeatureKind::Kurtosis, FeatureKind::Std], BandPowerMode::Time)
            .unwrap();
        assert_eq!(out.matrix.data[0], [0.0, 0.0]);
        assert_eq!(out.sentinel_cells, [(0, 0)]);
        assert_eq!(out.warnings.len(), 1);
    }

    #[test]
    fn empty_input_keeps_names() {
        let b = BandEpochs {
            band: BandDefinition::new("alpha", 7.0, 12.9),
            epochs: vec![],
        };
        let out = build_feature_matrix(&[b], &["C3".into(), "C4".into()], &FeatureKind::ALL, BandPowerMode::Time)
            .unwrap();
        assert!(out.matrix.is_empty());
        assert_eq!(out.matrix.n_cols(), 16);
        assert_eq!(out.matrix.names[0], "alpha.C3.band_power");
        assert_eq!(out.matrix.names[15], "alpha.C4.rms");
    }

    #[test]
    fn misaligned_bands_rejected() {
        let a = BandEpochs {
            band: BandDefinition::new("alpha", 7.0, 12.9),
            epochs: vec![epoch("s", "C3", 0, vec![1.0; 16]), epoch("s", "C3", 1, vec![1.0; 16])],
        };
        let b = BandEpochs {
            band: BandDefinition::new("beta", 13.0, 29.9),
            epochs: vec![epoch("s", "C3", 0, vec![1.0; 16])],
        };
        assert!(matches!(
            build_feature_matrix(&[a, b], &[], &[FeatureKind::Rms], BandPowerMode::Time),
            Err(FeatureError::MisalignedEpochs(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let m = FeatureMatrix {
            names: vec!["a.C3.rms".into(), "a.C3.std".into()],
            data: vec![vec![0.1, 1e-20], vec![-3.5, 12345.678]],
            labels: vec![CohortLabel::HealthyControl, CohortLabel::PdOffMedication],
            groups: vec!["s1".into(), "s2".into()],
        };
        let text = m.to_csv_string();
        assert!(text.starts_with("a.C3.rms,a.C3.std,label,subject\n"));
        assert_eq!(FeatureMatrix::from_csv_str(&text).unwrap(), m);
    }
}
