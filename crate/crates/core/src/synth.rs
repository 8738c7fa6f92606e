//! Seeded synthetic data: multichannel EEG-like recordings with a beta-band
//! effect in the PD cohort, and Gaussian feature tables for classifier checks.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::dsp::{apply_zero_phase, design_bandpass};
use crate::error::{Error, Result};
use crate::eval::derive_seed;
use crate::features::FeatureMatrix;
use crate::ingest::{write_bdf, BdfWriteOptions, CohortLabel, EegRecording};

/// Background rhythm: band edges and RMS amplitude in µV.
#[derive(Clone, Debug, PartialEq)]
pub struct RhythmComponent {
    pub lo_hz: f64,
    pub hi_hz: f64,
    pub rms_uv: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticEegSpec {
    pub subjects_per_cohort: usize,
    pub channels: Vec<String>,
    /// Whole seconds, so BDF records line up.
    pub seconds: usize,
    pub sampling_rate_hz: f64,
    pub components: Vec<RhythmComponent>,
    /// Index into `components` that carries the PD effect.
    pub beta_component: usize,
    /// Extra beta power in the PD cohort.
    pub beta_gain_db: f64,
    pub hum_hz: f64,
    pub hum_uv: f64,
    /// Standard deviation of a per-subject log-amplitude scale.
    pub subject_jitter: f64,
    pub pd_cohort: CohortLabel,
    pub seed: u64,
}

impl Default for SyntheticEegSpec {
    fn default() -> Self {
        SyntheticEegSpec {
            subjects_per_cohort: 5,
            channels: vec!["C3".into(), "C4".into()],
            seconds: 30,
            sampling_rate_hz: 128.0,
            components: vec![
                RhythmComponent { lo_hz: 1.0, hi_hz: 4.0, rms_uv: 20.0 },
                RhythmComponent { lo_hz: 4.0, hi_hz: 8.0, rms_uv: 10.0 },
                RhythmComponent { lo_hz: 8.0, hi_hz: 13.0, rms_uv: 15.0 },
                RhythmComponent { lo_hz: 13.0, hi_hz: 30.0, rms_uv: 6.0 },
                RhythmComponent { lo_hz: 30.0, hi_hz: 45.0, rms_uv: 3.0 },
            ],
            beta_component: 3,
            beta_gain_db: 6.0,
            hum_hz: 60.0,
            hum_uv: 5.0,
            subject_jitter: 0.1,
            pd_cohort: CohortLabel::PdOffMedication,
            seed: 7,
        }
    }
}

impl SyntheticEegSpec {
    /// Subject ids and cohorts: `hc01..`, then `pd01..`.
    pub fn subjects(&self) -> Vec<(String, CohortLabel)> {
        let hc = (1..=self.subjects_per_cohort).map(|i| (format!("hc{i:02}"), CohortLabel::HealthyControl));
        let pd = (1..=self.subjects_per_cohort).map(|i| (format!("pd{i:02}"), self.pd_cohort));
        hc.chain(pd).collect()
    }
}

fn band_noise(rng: &mut ChaCha8Rng, n: usize, fs: f64, c: &RhythmComponent, order: usize) -> Result<Vec<f64>> {
    let white: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let design = design_bandpass(fs, c.lo_hz, c.hi_hz, order)?;
    let mut x = apply_zero_phase(&design.filter, &white)?;
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if rms > 0.0 {
        let g = c.rms_uv / rms;
        x.iter_mut().for_each(|v| *v *= g);
    }
    Ok(x)
}

/// One recording. Every channel is a sum of band-limited Gaussian noise
/// components plus mains hum; PD subjects get `beta_gain_db` more power in
/// the beta component.
pub fn synthetic_recording(
    subject_id: &str,
    cohort: CohortLabel,
    spec: &SyntheticEegSpec,
    seed: u64,
) -> Result<EegRecording> {
    let fs = spec.sampling_rate_hz;
    let n = (spec.seconds as f64 * fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, spec.subject_jitter.max(0.0))
        .map_err(|e| Error::from(crate::dsp::DspError::InvalidParameter(e.to_string())))?;
    let scale = jitter.sample(&mut rng).exp();
    let beta_gain = if cohort.is_pd() {
        10f64.powf(spec.beta_gain_db / 20.0)
    } else {
        1.0
    };
    let mut data = Vec::with_capacity(spec.channels.len());
    for _ in &spec.channels {
        let mut x = vec![0.0; n];
        for (i, c) in spec.components.iter().enumerate() {
            let g = if i == spec.beta_component { beta_gain } else { 1.0 };
            for (acc, v) in x.iter_mut().zip(band_noise(&mut rng, n, fs, c, 4)?) {
                *acc += g * v;
            }
        }
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        for (t, v) in x.iter_mut().enumerate() {
            *v = scale * *v + spec.hum_uv * (std::f64::consts::TAU * spec.hum_hz * t as f64 / fs + phase).sin();
        }
        data.push(x);
    }
    Ok(EegRecording::new(subject_id, cohort, fs, spec.channels.clone(), data)?)
}

/// All recordings of the spec, in `subjects()` order.
pub fn synthetic_cohort(spec: &SyntheticEegSpec) -> Result<Vec<EegRecording>> {
    spec.subjects()
        .iter()
        .enumerate()
        .map(|(i, (s, c))| synthetic_recording(s, *c, spec, derive_seed(spec.seed, &[i as u64])))
        .collect()
}

fn write_csv(path: &Path, rec: &EegRecording) -> Result<()> {
    let mut out = rec.channel_names().join(",");
    out.push('\n');
    for t in 0..rec.n_samples() {
        let row: Vec<String> = rec.data().iter().map(|ch| ch[t].to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Write the cohort to `dir` as BDF files plus a `manifest.tsv`. The first
/// `csv_subjects` recordings are written as CSV instead. Returns the
/// manifest path.
pub fn write_synthetic_dataset(dir: &Path, spec: &SyntheticEegSpec, csv_subjects: usize) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = String::from("# path\tformat\tsubject\tcohort\n");
    for (i, rec) in synthetic_cohort(spec)?.iter().enumerate() {
        let (name, format) = if i < csv_subjects {
            let name = format!("{}.csv", rec.subject_id());
            write_csv(&dir.join(&name), rec)?;
            (name, "csv")
        } else {
            let name = format!("{}.bdf", rec.subject_id());
            write_bdf(&dir.join(&name), rec, &BdfWriteOptions::default())?;
            (name, "bdf")
        };
        let _ = writeln!(manifest, "{name}\t{format}\t{}\t{}", rec.subject_id(), rec.cohort());
    }
    let path = dir.join("manifest.tsv");
    std::fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSpec {
    pub n_features: usize,
    pub rows_per_class: usize,
    pub informative: usize,
    /// Difference of class means along each informative feature.
    pub separation: f64,
    pub subjects_per_class: usize,
    pub seed: u64,
}

impl Default for GaussianSpec {
    fn default() -> Self {
        GaussianSpec {
            n_features: 20,
            rows_per_class: 100,
            informative: 5,
            separation: 3.0,
            subjects_per_class: 10,
            seed: 1,
        }
    }
}

/// Two unit-variance Gaussian classes. Class 1 is shifted by `separation`
/// in the first `informative` features; rows are dealt evenly to subjects.
pub fn gaussian_feature_set(spec: &GaussianSpec) -> (FeatureMatrix, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let names = (0..spec.n_features).map(|j| format!("f{j:02}")).collect();
    let mut m = FeatureMatrix::empty(names);
    let mut y = Vec::new();
    let per_subject = spec.rows_per_class.div_ceil(spec.subjects_per_class.max(1));
    for class in 0..2 {
        for r in 0..spec.rows_per_class {
            let row: Vec<f64> = (0..spec.n_features)
                .map(|j| {
                    let z: f64 = rng.sample(StandardNormal);
                    if class == 1 && j < spec.informative {
                        z + spec.separation
                    } else {
                        z
                    }
                })
                .collect();
            let (tag, cohort) = if class == 0 {
                ("hc", CohortLabel::HealthyControl)
            } else {
                ("pd", CohortLabel::PdOffMedication)
            };
            m.data.push(row);
            m.labels.push(cohort);
            m.groups.push(format!("{tag}{:02}", r / per_subject));
            y.push(class);
        }
    }
    (m, y)
}

/// Seeded shuffle of row labels; destroys any feature/label association.
pub fn permute_labels(y: &[usize], seed: u64) -> Vec<usize> {
    let mut out = y.to_vec();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recording_shape_and_determinism() {
        let spec = SyntheticEegSpec {
            seconds: 4,
            ..SyntheticEegSpec::default()
        };
        let a = synthetic_recording("hc01", CohortLabel::HealthyControl, &spec, 3).unwrap();
        let b = synthetic_recording("hc01", CohortLabel::HealthyControl, &spec, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_channels(), 2);
        assert_eq!(a.n_samples(), 512);
    }

    #[test]
    fn gaussian_set_shape() {
        let (m, y) = gaussian_feature_set(&GaussianSpec::default());
        assert_eq!(m.n_rows(), 200);
        assert_eq!(m.n_cols(), 20);
        assert_eq!(y.iter().filter(|&&c| c == 1).count(), 100);
        let subjects: std::collections::BTreeSet<_> = m.groups.iter().collect();
        assert_eq!(subjects.len(), 20);
    }
}
