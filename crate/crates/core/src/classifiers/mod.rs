//! The eight classifiers behind a single train/predict contract.
//!
//! Labels are class indices `0..K`. Each trainer validates its input with
//! [`check_rows`] and returns a model that is immutable afterwards;
//! [`TrainedModel`] wraps them for uniform prediction and serialization.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod discriminant;
pub mod forest;
pub mod kernel;
pub mod knn;
pub mod naive_bayes;
pub mod svm;
pub mod tree;
pub mod vote;

pub use discriminant::{train_lda, train_qda, LdaModel, QdaModel, DEFAULT_RIDGE};
pub use forest::{train_rf, RfModel, RfParams};
pub use kernel::{kernel_eval, KernelSpec};
pub use knn::{train_knn, KnnModel};
pub use naive_bayes::{train_nb, NbModel, DEFAULT_VAR_FLOOR};
pub use svm::{train_svm, train_svm_classes, SvmModel, SvmParams};
pub use tree::{train_dt, DtModel, DtParams, Node};
pub use vote::majority_vote;

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("dimension mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{rows} rows but {labels} labels")]
    LengthMismatch { rows: usize, labels: usize },
    #[error("non-finite feature value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("k = {k} is invalid for {n} training rows")]
    KTooLarge { k: usize, n: usize },
    #[error("class {class} has {n} samples; at least 2 are needed")]
    ClassTooSmall { class: usize, n: usize },
    #[error("covariance not positive definite after ridge escalation (λ = {lambda:e})")]
    NotPositiveDefinite { lambda: f64 },
    #[error("class {0} has no training samples")]
    EmptyClass(usize),
    #[error("empty ballot")]
    EmptyBallot,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown classifier {0:?}")]
    UnknownClassifier(String),
    #[error("model file: {0}")]
    Serialization(String),
}

/// Validate a training matrix and return its dimensionality.
pub fn check_rows(x: &[Vec<f64>], n_labels: usize) -> Result<usize, ClassifierError> {
    let Some(first) = x.first() else {
        return Err(ClassifierError::EmptyTrainingSet);
    };
    if x.len() != n_labels {
        return Err(ClassifierError::LengthMismatch {
            rows: x.len(),
            labels: n_labels,
        });
    }
    let d = first.len();
    if d == 0 {
        return Err(ClassifierError::DimensionMismatch { expected: 1, found: 0 });
    }
    for (row, xi) in x.iter().enumerate() {
        if xi.len() != d {
            return Err(ClassifierError::DimensionMismatch {
                expected: d,
                found: xi.len(),
            });
        }
        if let Some(col) = xi.iter().position(|v| !v.is_finite()) {
            return Err(ClassifierError::NonFinite { row, col });
        }
    }
    Ok(d)
}

/// `max(y) + 1`.
pub fn n_classes(y: &[usize]) -> usize {
    y.iter().max().map_or(0, |m| m + 1)
}

/// Index of the largest value; the first wins ties and NaN never wins.
pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] || v[best].is_nan() {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Svm,
    Knn,
    Lda,
    Qda,
    Nb,
    Dt,
    Rf,
    Vote,
}

impl ClassifierKind {
    pub const BASE: [ClassifierKind; 7] = [
        ClassifierKind::Knn,
        ClassifierKind::Lda,
        ClassifierKind::Qda,
        ClassifierKind::Nb,
        ClassifierKind::Dt,
        ClassifierKind::Rf,
        ClassifierKind::Svm,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ClassifierKind::Svm => "svm",
            ClassifierKind::Knn => "knn",
            ClassifierKind::Lda => "lda",
            ClassifierKind::Qda => "qda",
            ClassifierKind::Nb => "nb",
            ClassifierKind::Dt => "dt",
            ClassifierKind::Rf => "rf",
            ClassifierKind::Vote => "vote",
        }
    }

    /// Row label in the comparison table.
    pub fn display_name(self) -> &'static str {
        match self {
            ClassifierKind::Svm => "SVM",
            ClassifierKind::Knn => "KNN",
            ClassifierKind::Lda => "LDA",
            ClassifierKind::Qda => "QDA",
            ClassifierKind::Nb => "NB",
            ClassifierKind::Dt => "DT",
            ClassifierKind::Rf => "RF",
            ClassifierKind::Vote => "Majority Vote",
        }
    }

    /// Tie-break rank in the majority vote; lower wins.
    pub fn priority(self) -> u8 {
        match self {
            ClassifierKind::Svm => 0,
            ClassifierKind::Rf => 1,
            ClassifierKind::Nb => 2,
            ClassifierKind::Knn => 3,
            ClassifierKind::Lda => 4,
            ClassifierKind::Qda => 5,
            ClassifierKind::Dt => 6,
            ClassifierKind::Vote => 7,
        }
    }

    /// Position in the report table (KNN first, SVM last before the vote).
    pub fn table_rank(self) -> usize {
        match self {
            ClassifierKind::Vote => 7,
            k => Self::BASE.iter().position(|&b| b == k).unwrap_or(7),
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ClassifierKind {
    type Err = ClassifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [Self::BASE.as_slice(), &[ClassifierKind::Vote]].concat();
        all.into_iter()
            .find(|k| k.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ClassifierError::UnknownClassifier(s.to_string()))
    }
}

/// A base classifier together with its hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClassifierSpec {
    Svm(SvmParams),
    Knn { k: usize },
    Lda { ridge: f64 },
    Qda { ridge: f64 },
    Nb { var_floor: f64 },
    Dt(DtParams),
    Rf(RfParams),
}

impl ClassifierSpec {
    pub fn default_for(kind: ClassifierKind) -> Option<ClassifierSpec> {
        Some(match kind {
            ClassifierKind::Svm => ClassifierSpec::Svm(SvmParams::default()),
            ClassifierKind::Knn => ClassifierSpec::Knn { k: 5 },
            ClassifierKind::Lda => ClassifierSpec::Lda { ridge: DEFAULT_RIDGE },
            ClassifierKind::Qda => ClassifierSpec::Qda { ridge: DEFAULT_RIDGE },
            ClassifierKind::Nb => ClassifierSpec::Nb {
                var_floor: DEFAULT_VAR_FLOOR,
            },
            ClassifierKind::Dt => ClassifierSpec::Dt(DtParams::default()),
            ClassifierKind::Rf => ClassifierSpec::Rf(RfParams::default()),
            ClassifierKind::Vote => return None,
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierSpec::Svm(_) => ClassifierKind::Svm,
            ClassifierSpec::Knn { .. } => ClassifierKind::Knn,
            ClassifierSpec::Lda { .. } => ClassifierKind::Lda,
            ClassifierSpec::Qda { .. } => ClassifierKind::Qda,
            ClassifierSpec::Nb { .. } => ClassifierKind::Nb,
            ClassifierSpec::Dt(_) => ClassifierKind::Dt,
            ClassifierSpec::Rf(_) => ClassifierKind::Rf,
        }
    }

    /// Short configuration string, e.g. `Poly (E=2), C=1`.
    pub fn describe(&self) -> String {
        match self {
            ClassifierSpec::Svm(p) => format!("{}, C={}", p.kernel.describe(), p.c),
            ClassifierSpec::Knn { k } => format!("k={k}"),
            ClassifierSpec::Lda { ridge } | ClassifierSpec::Qda { ridge } => format!("ridge={ridge:e}"),
            ClassifierSpec::Nb { var_floor } => format!("var_floor={var_floor:e}"),
            ClassifierSpec::Dt(p) => match p.max_depth {
                Some(d) => format!("max_depth={d}"),
                None => "unlimited depth".to_string(),
            },
            ClassifierSpec::Rf(p) => format!("Trees: {}", p.n_trees),
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |msg: String| Err(ClassifierError::InvalidParameter(msg));
        match self {
            ClassifierSpec::Svm(p) => {
                p.kernel.validate()?;
                if !(p.c > 0.0 && p.c.is_finite()) || !(p.tol > 0.0) {
                    return bad(format!("svm needs positive C and tol (got {}, {})", p.c, p.tol));
                }
            }
            ClassifierSpec::Knn { k } if *k == 0 => return bad("knn k must be at least 1".into()),
            ClassifierSpec::Lda { ridge } | ClassifierSpec::Qda { ridge } if !(*ridge >= 0.0) => {
                return bad(format!("ridge must be nonnegative (got {ridge})"))
            }
            ClassifierSpec::Nb { var_floor } if !(*var_floor > 0.0) => {
                return bad(format!("variance floor must be positive (got {var_floor})"))
            }
            ClassifierSpec::Dt(p) => tree::validate_params(p)?,
            ClassifierSpec::Rf(p) => {
                tree::validate_params(&DtParams {
                    max_depth: p.max_depth,
                    min_samples_split: p.min_samples_split,
                })?;
                if p.n_trees == 0 {
                    return bad("random forest needs at least one tree".into());
                }
                if p.max_features == Some(0) {
                    return bad("max_features must be at least 1".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Fit on class-index labels. `seed` only matters for the forest.
    pub fn train(&self, x: &[Vec<f64>], y: &[usize], seed: u64) -> Result<TrainedModel, ClassifierError> {
        Ok(match self {
            ClassifierSpec::Svm(p) => TrainedModel::Svm(train_svm_classes(x, y, p)?),
            ClassifierSpec::Knn { k } => TrainedModel::Knn(train_knn(x, y, *k)?),
            ClassifierSpec::Lda { ridge } => TrainedModel::Lda(train_lda(x, y, *ridge)?),
            ClassifierSpec::Qda { ridge } => TrainedModel::Qda(train_qda(x, y, *ridge)?),
            ClassifierSpec::Nb { var_floor } => TrainedModel::Nb(train_nb(x, y, *var_floor)?),
            ClassifierSpec::Dt(p) => TrainedModel::Dt(train_dt(x, y, *p)?),
            ClassifierSpec::Rf(p) => TrainedModel::Rf(train_rf(x, y, *p, seed)?),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoteModel {
    pub members: Vec<TrainedModel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "classifier", content = "params", rename_all = "lowercase")]
pub enum TrainedModel {
    Svm(SvmModel),
    Knn(KnnModel),
    Lda(LdaModel),
    Qda(QdaModel),
    Nb(NbModel),
    Dt(DtModel),
    Rf(RfModel),
    Vote(VoteModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedModel::Svm(_) => ClassifierKind::Svm,
            TrainedModel::Knn(_) => ClassifierKind::Knn,
            TrainedModel::Lda(_) => ClassifierKind::Lda,
            TrainedModel::Qda(_) => ClassifierKind::Qda,
            TrainedModel::Nb(_) => ClassifierKind::Nb,
            TrainedModel::Dt(_) => ClassifierKind::Dt,
            TrainedModel::Rf(_) => ClassifierKind::Rf,
            TrainedModel::Vote(_) => ClassifierKind::Vote,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Svm(m) => m.n_features(),
            TrainedModel::Knn(m) => m.n_features(),
            TrainedModel::Lda(m) => m.n_features(),
            TrainedModel::Qda(m) => m.n_features(),
            TrainedModel::Nb(m) => m.n_features(),
            TrainedModel::Dt(m) => m.n_features(),
            TrainedModel::Rf(m) => m.n_features(),
            TrainedModel::Vote(v) => v.members.first().map_or(0, TrainedModel::n_features),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ClassifierError> {
        predict(self, x)
    }

    pub fn predict_many(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>, ClassifierError> {
        rows.iter().map(|r| predict(self, r)).collect()
    }
}

pub fn predict(model: &TrainedModel, x: &[f64]) -> Result<usize, ClassifierError> {
    let expected = model.n_features();
    if x.len() != expected {
        return Err(ClassifierError::DimensionMismatch {
            expected,
            found: x.len(),
        });
    }
    Ok(match model {
        TrainedModel::Svm(m) => m.predict_class(x),
        TrainedModel::Knn(m) => m.predict(x),
        TrainedModel::Lda(m) => m.predict(x),
        TrainedModel::Qda(m) => m.predict(x),
        TrainedModel::Nb(m) => m.predict(x),
        TrainedModel::Dt(m) => m.predict(x),
        TrainedModel::Rf(m) => m.predict(x),
        TrainedModel::Vote(v) => {
            let ballot = v
                .members
                .iter()
                .map(|m| Ok((m.kind(), predict(m, x)?)))
                .collect::<Result<Vec<_>, ClassifierError>>()?;
            majority_vote(&ballot)?
        }
    })
}

pub const MODEL_FORMAT: &str = "pdeeg-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: TrainedModel,
}

pub fn model_to_json(model: &TrainedModel) -> Result<String, ClassifierError> {
    let file = ModelFile {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        model: model.clone(),
    };
    serde_json::to_string_pretty(&file)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| ClassifierError::Serialization(e.to_string()))
}

pub fn model_from_json(text: &str) -> Result<TrainedModel, ClassifierError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| ClassifierError::Serialization(e.to_string()))?;
    if file.format != MODEL_FORMAT {
        return Err(ClassifierError::Serialization(format!(
            "expected format {MODEL_FORMAT:?}, found {:?}",
            file.format
        )));
    }
    if file.version != MODEL_VERSION {
        return Err(ClassifierError::Serialization(format!(
            "unsupported model version {} (this build reads {MODEL_VERSION})",
            file.version
        )));
    }
    Ok(file.model)
}

pub fn save_model(path: &Path, model: &TrainedModel) -> Result<(), ClassifierError> {
    let text = model_to_json(model)?;
    std::fs::write(path, text).map_err(|e| ClassifierError::Serialization(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<TrainedModel, ClassifierError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ClassifierError::Serialization(format!("{}: {e}", path.display())))?;
    model_from_json(&text)
}
