//! Experiment configuration, read from a single TOML file.
//!
//! ```toml
//! manifest = "fixtures/synthetic/manifest.tsv"
//! seed = 42
//!
//! [filter]
//! notch_hz = 60.0
//! bandpass_hi_hz = 80.0
//!
//! [evaluation]
//! folds = 5
//! classifiers = ["knn", "lda", "qda", "nb", "dt", "rf", "svm", "vote"]
//! ```
//!
//! Every section is optional except `manifest` and `seed`. Relative paths
//! are resolved against the directory holding the config file.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::{
    ClassifierKind, ClassifierSpec, DtParams, KernelSpec, RfParams, SvmParams, DEFAULT_RIDGE, DEFAULT_VAR_FLOOR,
};
use crate::dsp::{default_bands, epoch_geometry, BandDefinition};
use crate::eval::EvalSettings;
use crate::features::{BandPowerMode, FeatureKind};
use crate::ingest::CohortLabel;
use crate::pipeline::PipelineSettings;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("config field {field}: {message}")]
    Invalid { field: String, message: String },
}

/// Which recordings form the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdClass {
    #[default]
    PdOff,
    PdOn,
    Both,
}

impl PdClass {
    /// Binary label of a cohort (0 = control, 1 = PD), or `None` when the
    /// cohort is left out of the task.
    pub fn label(self, cohort: CohortLabel) -> Option<usize> {
        match (self, cohort) {
            (_, CohortLabel::HealthyControl) => Some(0),
            (PdClass::PdOff | PdClass::Both, CohortLabel::PdOffMedication) => Some(1),
            (PdClass::PdOn | PdClass::Both, CohortLabel::PdOnMedication) => Some(1),
            _ => None,
        }
    }

    pub fn class_names(self) -> [&'static str; 2] {
        match self {
            PdClass::PdOff => ["hc", "pd_off"],
            PdClass::PdOn => ["hc", "pd_on"],
            PdClass::Both => ["hc", "pd"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub notch: bool,
    pub notch_hz: f64,
    pub notch_q: f64,
    pub bandpass: bool,
    pub bandpass_lo_hz: f64,
    pub bandpass_hi_hz: f64,
    pub order: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            notch: true,
            notch_hz: 60.0,
            notch_q: 30.0,
            bandpass: true,
            bandpass_lo_hz: 0.1,
            bandpass_hi_hz: 80.0,
            order: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpochConfig {
    pub seconds: f64,
    pub overlap: f64,
}

impl Default for EpochConfig {
    fn default() -> Self {
        EpochConfig {
            seconds: 2.0,
            overlap: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub band_power_mode: BandPowerMode,
    pub set: Vec<FeatureKind>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            band_power_mode: BandPowerMode::Time,
            set: FeatureKind::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub folds: usize,
    /// Classifier tags; `vote` adds the majority vote over the others.
    pub classifiers: Vec<String>,
    /// Put wall-clock build times into the report. Off by default because it
    /// makes reports differ between otherwise identical runs.
    pub record_timings: bool,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            folds: 5,
            classifiers: ClassifierKind::BASE
                .iter()
                .chain(&[ClassifierKind::Vote])
                .map(|k| k.tag().to_string())
                .collect(),
            record_timings: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RidgeParams {
    pub ridge: f64,
}

impl Default for RidgeParams {
    fn default() -> Self {
        RidgeParams { ridge: DEFAULT_RIDGE }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbParams {
    pub var_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams {
            var_floor: DEFAULT_VAR_FLOOR,
        }
    }
}

/// Hyperparameters of the headline run, one table per classifier.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierParams {
    pub svm: SvmParams,
    pub knn: KnnParams,
    pub lda: RidgeParams,
    pub qda: RidgeParams,
    pub nb: NbParams,
    pub dt: DtParams,
    pub rf: RfParams,
}

impl ClassifierParams {
    pub fn spec(&self, kind: ClassifierKind) -> Option<ClassifierSpec> {
        Some(match kind {
            ClassifierKind::Svm => ClassifierSpec::Svm(self.svm),
            ClassifierKind::Knn => ClassifierSpec::Knn { k: self.knn.k },
            ClassifierKind::Lda => ClassifierSpec::Lda { ridge: self.lda.ridge },
            ClassifierKind::Qda => ClassifierSpec::Qda { ridge: self.qda.ridge },
            ClassifierKind::Nb => ClassifierSpec::Nb {
                var_floor: self.nb.var_floor,
            },
            ClassifierKind::Dt => ClassifierSpec::Dt(self.dt),
            ClassifierKind::Rf => ClassifierSpec::Rf(self.rf),
            ClassifierKind::Vote => return None,
        })
    }
}

/// Extra configurations evaluated alongside the headline classifiers.
/// Other hyperparameters are taken from the `[classifiers]` tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub enabled: bool,
    pub svm_kernels: Vec<KernelSpec>,
    pub rf_trees: Vec<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        let mut svm_kernels: Vec<KernelSpec> = (1..=5)
            .map(|degree| KernelSpec::Polynomial { degree, coef0: 1.0 })
            .collect();
        svm_kernels.push(KernelSpec::Rbf { gamma: 0.25 });
        svm_kernels.push(KernelSpec::Rbf { gamma: 0.5 });
        GridConfig {
            enabled: true,
            svm_kernels,
            rf_trees: vec![10, 50],
        }
    }
}

impl GridConfig {
    pub fn specs(&self, base: &ClassifierParams) -> Vec<ClassifierSpec> {
        if !self.enabled {
            return Vec::new();
        }
        let svm = self.svm_kernels.iter().map(|&kernel| {
            ClassifierSpec::Svm(SvmParams {
                kernel,
                ..base.svm
            })
        });
        let rf = self.rf_trees.iter().map(|&n_trees| {
            ClassifierSpec::Rf(RfParams {
                n_trees,
                ..base.rf
            })
        });
        svm.chain(rf).collect()
    }
}

fn default_csv_rate() -> f64 {
    128.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub manifest: PathBuf,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// CSV recordings carry no rate of their own.
    #[serde(default = "default_csv_rate")]
    pub csv_sampling_rate_hz: f64,
    #[serde(default)]
    pub pd_class: PdClass,
    #[serde(default)]
    pub filter: FilterConfig,
    #[serde(default = "default_bands")]
    pub bands: Vec<BandDefinition>,
    #[serde(default)]
    pub epochs: EpochConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    #[serde(default)]
    pub classifiers: ClassifierParams,
    #[serde(default)]
    pub grid: GridConfig,
    /// Directory the config was read from.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// One validation result, located by config field or file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub location: String,
    pub message: String,
}

impl Finding {
    pub fn error(location: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            severity: Severity::Error,
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn warning(location: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            severity: Severity::Warning,
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: {}: {}", self.location, self.message)
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: base_dir.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        let mut cfg: ExperimentConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.base_dir = base;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.resolve(&self.manifest)
    }

    /// Enabled base classifiers in table order, and whether the vote is on.
    pub fn classifier_kinds(&self) -> Result<(Vec<ClassifierKind>, bool), ConfigError> {
        let mut kinds = Vec::new();
        let mut vote = false;
        for tag in &self.evaluation.classifiers {
            let kind: ClassifierKind = tag.parse().map_err(|_| ConfigError::Invalid {
                field: "evaluation.classifiers".into(),
                message: format!(
                    "unknown classifier {tag:?} (expected one of knn, lda, qda, nb, dt, rf, svm, vote)"
                ),
            })?;
            if kind == ClassifierKind::Vote {
                vote = true;
            } else if !kinds.contains(&kind) {
                kinds.push(kind);
            }
        }
        kinds.sort_by_key(|k| k.table_rank());
        Ok((kinds, vote))
    }

    /// Static checks that need no data files.
    pub fn validate(&self) -> Vec<Finding> {
        let mut out = Vec::new();
        let f = &self.filter;
        if f.notch && !(f.notch_hz > 0.0 && f.notch_q > 0.0) {
            out.push(Finding::error("filter.notch_hz", "notch frequency and Q must be positive"));
        }
        if f.bandpass && !(f.bandpass_lo_hz >= 0.0 && f.bandpass_lo_hz < f.bandpass_hi_hz) {
            out.push(Finding::error(
                "filter.bandpass_lo_hz",
                format!("band-pass edges {}..{} Hz are not increasing", f.bandpass_lo_hz, f.bandpass_hi_hz),
            ));
        }
        if ![2, 4, 6, 8].contains(&f.order) {
            out.push(Finding::error("filter.order", format!("order {} is not one of 2, 4, 6, 8", f.order)));
        }
        if self.bands.is_empty() {
            out.push(Finding::error("bands", "no bands defined"));
        }
        for (i, b) in self.bands.iter().enumerate() {
            if !(b.lo_hz >= 0.0 && b.lo_hz < b.hi_hz) {
                out.push(Finding::error(
                    format!("bands[{i}] ({})", b.name),
                    format!("edges {}..{} Hz are not increasing", b.lo_hz, b.hi_hz),
                ));
            }
            if self.bands[..i].iter().any(|o| o.name == b.name) {
                out.push(Finding::error(format!("bands[{i}]"), format!("duplicate band name {:?}", b.name)));
            }
            if b.name.contains('.') || b.name.contains(',') || b.name.is_empty() {
                out.push(Finding::error(
                    format!("bands[{i}]"),
                    format!("band name {:?} must be nonempty without '.' or ','", b.name),
                ));
            }
        }
        if !(self.epochs.seconds > 0.0) || !(0.0..1.0).contains(&self.epochs.overlap) {
            out.push(Finding::error(
                "epochs",
                format!(
                    "need seconds > 0 and overlap in [0, 1) (got {}, {})",
                    self.epochs.seconds, self.epochs.overlap
                ),
            ));
        }
        if !(self.csv_sampling_rate_hz > 0.0) {
            out.push(Finding::error("csv_sampling_rate_hz", "must be positive"));
        } else if self.epochs.seconds > 0.0 && (0.0..1.0).contains(&self.epochs.overlap) {
            let (len, _) = epoch_geometry(self.csv_sampling_rate_hz, self.epochs.seconds, self.epochs.overlap);
            if len < 16 {
                out.push(Finding::error(
                    "epochs.seconds",
                    format!("epochs of {len} samples are shorter than the 16-sample minimum"),
                ));
            }
        }
        if self.features.set.is_empty() {
            out.push(Finding::error("features.set", "no features selected"));
        }
        for (i, k) in self.features.set.iter().enumerate() {
            if self.features.set[..i].contains(k) {
                out.push(Finding::error("features.set", format!("duplicate feature {k}")));
            }
        }
        if self.evaluation.folds < 2 {
            out.push(Finding::error("evaluation.folds", "need at least 2 folds"));
        }
        match self.classifier_kinds() {
            Err(e) => out.push(Finding::error("evaluation.classifiers", e.to_string())),
            Ok((kinds, vote)) => {
                if kinds.is_empty() {
                    out.push(Finding::error("evaluation.classifiers", "no base classifier enabled"));
                } else if vote && kinds.len() < 2 {
                    out.push(Finding::warning("evaluation.classifiers", "majority vote over a single classifier"));
                }
                for k in kinds {
                    if let Some(spec) = self.classifiers.spec(k) {
                        if let Err(e) = spec.validate() {
                            out.push(Finding::error(format!("classifiers.{}", k.tag()), e.to_string()));
                        }
                    }
                }
            }
        }
        for (i, spec) in self.grid.specs(&self.classifiers).iter().enumerate() {
            if let Err(e) = spec.validate() {
                out.push(Finding::error(format!("grid[{i}] ({})", spec.describe()), e.to_string()));
            }
        }
        out
    }

    /// The same config with the seed replaced.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        self
    }

    pub fn pipeline_settings(&self) -> PipelineSettings {
        let f = &self.filter;
        PipelineSettings {
            notch: f.notch.then_some((f.notch_hz, f.notch_q)),
            bandpass: f.bandpass.then_some((f.bandpass_lo_hz, f.bandpass_hi_hz)),
            order: f.order,
            bands: self.bands.clone(),
            epoch_seconds: self.epochs.seconds,
            overlap: self.epochs.overlap,
            features: self.features.set.clone(),
            band_power_mode: self.features.band_power_mode,
            csv_sampling_rate_hz: self.csv_sampling_rate_hz,
        }
    }

    pub fn eval_settings(&self) -> Result<EvalSettings, ConfigError> {
        let (kinds, vote) = self.classifier_kinds()?;
        Ok(EvalSettings {
            folds: self.evaluation.folds,
            seed: self.seed,
            classifiers: kinds.iter().filter_map(|&k| self.classifiers.spec(k)).collect(),
            vote,
            grid: self.grid.specs(&self.classifiers),
            record_timings: self.evaluation.record_timings,
        })
    }

    /// Config as echoed into reports: no output directory, so runs that
    /// differ only in where they write produce identical reports.
    pub fn echo(&self) -> serde_json::Value {
        let mut c = self.clone();
        c.output_dir = None;
        serde_json::to_value(&c).unwrap_or(serde_json::Value::Null)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = ExperimentConfig::from_toml_str("manifest = \"m.tsv\"\nseed = 1\n", Path::new("/cfg")).unwrap();
        assert_eq!(cfg.bands.len(), 5);
        assert_eq!(cfg.evaluation.folds, 5);
        assert_eq!(cfg.filter.order, 4);
        assert_eq!(cfg.manifest_path(), PathBuf::from("/cfg/m.tsv"));
        assert!(cfg.validate().is_empty(), "{:?}", cfg.validate());
        let (kinds, vote) = cfg.classifier_kinds().unwrap();
        assert_eq!(kinds.len(), 7);
        assert!(vote);
        assert_eq!(cfg.grid.specs(&cfg.classifiers).len(), 9);
    }

    #[test]
    fn seed_is_required() {
        assert!(ExperimentConfig::from_toml_str("manifest = \"m.tsv\"\n", Path::new(".")).is_err());
    }

    #[test]
    fn unknown_classifier_is_an_error() {
        let text = "manifest = \"m.tsv\"\nseed = 1\n[evaluation]\nclassifiers = [\"svm\", \"mlp\"]\n";
        let cfg = ExperimentConfig::from_toml_str(text, Path::new(".")).unwrap();
        let findings = cfg.validate();
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].severity, Severity::Error);
        assert!(findings[0].message.contains("mlp"));
    }

    #[test]
    fn nested_tables_parse() {
        let text = r#"
manifest = "m.tsv"
seed = 3
pd_class = "both"

[classifiers.svm]
kernel = { type = "rbf", gamma = 0.5 }
c = 2.0

[classifiers.rf]
n_trees = 50

[[bands]]
name = "beta"
lo_hz = 13.0
hi_hz = 29.9
"#;
        let cfg = ExperimentConfig::from_toml_str(text, Path::new(".")).unwrap();
        assert_eq!(cfg.classifiers.svm.kernel, KernelSpec::Rbf { gamma: 0.5 });
        assert_eq!(cfg.classifiers.svm.tol, 1e-3);
        assert_eq!(cfg.classifiers.rf.n_trees, 50);
        assert_eq!(cfg.bands.len(), 1);
        assert_eq!(cfg.pd_class, PdClass::Both);
        assert_eq!(cfg.pd_class.label(CohortLabel::PdOnMedication), Some(1));
        assert_eq!(PdClass::PdOff.label(CohortLabel::PdOnMedication), None);
    }

    #[test]
    fn typo_is_rejected() {
        let text = "manifest = \"m.tsv\"\nseed = 1\n[filter]\nnotch_hertz = 50.0\n";
        assert!(matches!(
            ExperimentConfig::from_toml_str(text, Path::new(".")),
            Err(ConfigError::Parse { .. })
        ));
    }
}
