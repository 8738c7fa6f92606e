//! Per-epoch scalar features and the labelled feature matrix.

mod matrix;
pub mod scalar;
mod standardize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use matrix::{build_feature_matrix, BandEpochs, FeatureBuild, FeatureMatrix, FeatureVector};
pub use scalar::{average_energy, kurtosis, l2_norm, rms, std_dev, variance};
pub use standardize::{apply_standardization, fit_standardization, StandardizationStats};

use crate::spectral::SpectralError;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("empty signal")]
    EmptySignal,
    #[error("signal of {len} samples is shorter than the {min} required")]
    TooShort { len: usize, min: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("misaligned epochs: {0}")]
    MisalignedEpochs(String),
    #[error("column mismatch: {0}")]
    ColumnMismatch(String),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("malformed feature CSV: {0}")]
    MalformedCsv(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// The feature columns computed per (band, channel).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    BandPower,
    LogBandPower,
    Std,
    Kurtosis,
    Variance,
    Norm,
    AvgEnergy,
    Rms,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 8] = [
        FeatureKind::BandPower,
        FeatureKind::LogBandPower,
        FeatureKind::Std,
        FeatureKind::Kurtosis,
        FeatureKind::Variance,
        FeatureKind::Norm,
        FeatureKind::AvgEnergy,
        FeatureKind::Rms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::BandPower => "band_power",
            FeatureKind::LogBandPower => "log_band_power",
            FeatureKind::Std => "std",
            FeatureKind::Kurtosis => "kurtosis",
            FeatureKind::Variance => "variance",
            FeatureKind::Norm => "norm",
            FeatureKind::AvgEnergy => "avg_energy",
            FeatureKind::Rms => "rms",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureKind {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| FeatureError::UnknownFeature(s.to_string()))
    }
}

/// How `band_power` (and `log_band_power`) are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandPowerMode {
    /// Mean square of the band-filtered samples.
    #[default]
    Time,
    /// Periodogram integrated over the band edges.
    Spectral,
}
