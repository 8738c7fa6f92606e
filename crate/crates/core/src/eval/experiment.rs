use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{check_no_leakage, grouped_kfold, FoldAssignment};
use super::metrics::{accuracy, cohens_kappa, confusion, ConfusionMatrix};
use super::EvalError;
use crate::classifiers::{majority_vote, ClassifierKind, ClassifierSpec, TrainedModel};
use crate::config::{ExperimentConfig, PdClass};
use crate::error::{Error, Result, StageContext};
use crate::features::{fit_standardization, FeatureBuild, FeatureMatrix, StandardizationStats};
use crate::ingest::DatasetManifest;
use crate::pipeline::extract_features;
use crate::warning::Warning;

pub const PROTOCOL: &str = "subject-grouped k-fold cross-validation, standardization fitted on training folds, pooled confusion";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub folds: usize,
    pub seed: u64,
    /// Headline classifiers, in report order.
    pub classifiers: Vec<ClassifierSpec>,
    /// Add a majority vote over the headline classifiers.
    pub vote: bool,
    /// Extra configurations reported in a separate table.
    pub grid: Vec<ClassifierSpec>,
    pub record_timings: bool,
}

impl EvalSettings {
    /// All seven base classifiers with default hyperparameters plus the vote.
    pub fn all_defaults(folds: usize, seed: u64) -> Self {
        EvalSettings {
            folds,
            seed,
            classifiers: ClassifierKind::BASE
                .iter()
                .filter_map(|&k| ClassifierSpec::default_for(k))
                .collect(),
            vote: true,
            grid: Vec::new(),
            record_timings: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierResult {
    pub kind: ClassifierKind,
    pub name: String,
    pub configuration: String,
    /// Pooled over all folds.
    pub accuracy: f64,
    pub kappa: f64,
    pub confusion: ConfusionMatrix,
    pub fold_accuracy: Vec<f64>,
    pub mean_fold_accuracy: f64,
    /// Summed over folds; present only when timings are recorded.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub build_time_s: Option<f64>,
    /// Out-of-fold prediction for every row.
    pub predictions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub test_subjects: Vec<String>,
}

/// Wall-clock training time of one classifier, summed over folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub name: String,
    pub configuration: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub protocol: String,
    pub seed: u64,
    pub folds: usize,
    pub class_names: Vec<String>,
    pub n_rows: usize,
    pub n_features: usize,
    pub n_subjects: usize,
    pub results: Vec<ClassifierResult>,
    pub grid: Vec<ClassifierResult>,
    pub fold_breakdown: Vec<FoldSummary>,
    pub y_true: Vec<usize>,
    pub groups: Vec<String>,
    pub warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub config: Option<serde_json::Value>,
    /// Always measured, never serialized with the report.
    #[serde(skip)]
    pub timings: Vec<Timing>,
}

impl EvaluationReport {
    pub fn result(&self, kind: ClassifierKind) -> Option<&ClassifierResult> {
        self.results.iter().find(|r| r.kind == kind)
    }
}

/// Feature rows restricted to the two classes of a task.
#[derive(Clone, Debug)]
pub struct BinaryTask {
    pub matrix: FeatureMatrix,
    pub y: Vec<usize>,
    pub class_names: Vec<String>,
}

pub fn binary_task(matrix: &FeatureMatrix, pd_class: PdClass) -> BinaryTask {
    let (rows, y): (Vec<usize>, Vec<usize>) = matrix
        .labels
        .iter()
        .enumerate()
        .filter_map(|(r, &c)| pd_class.label(c).map(|l| (r, l)))
        .unzip();
    BinaryTask {
        matrix: matrix.select_rows(&rows),
        y,
        class_names: pd_class.class_names().iter().map(|s| s.to_string()).collect(),
    }
}

/// SplitMix64 over the seed and a path of indices.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut z = seed;
    for &p in path {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p.wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Standardization fitted on the training rows of one fold.
pub fn fold_standardization(matrix: &FeatureMatrix, train_rows: &[usize]) -> StandardizationStats {
    fit_standardization(&matrix.select_rows(train_rows))
}

fn standardized_rows(stats: &StandardizationStats, matrix: &FeatureMatrix, rows: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|&r| {
            let mut v = matrix.data[r].clone();
            stats.transform_in_place(&mut v);
            v
        })
        .collect()
}

struct FoldOutcome {
    test_rows: Vec<usize>,
    /// Per spec, predictions for `test_rows`.
    predictions: Vec<Vec<usize>>,
    seconds: Vec<f64>,
    warnings: Vec<Warning>,
}

fn run_fold(
    matrix: &FeatureMatrix,
    y: &[usize],
    assignment: &FoldAssignment,
    fold: usize,
    specs: &[ClassifierSpec],
    seed: u64,
) -> Result<FoldOutcome> {
    let train = assignment.train_rows(fold);
    let test = assignment.test_rows(fold);
    check_no_leakage(&matrix.groups, &train, &test)?;
    let stats = fold_standardization(matrix, &train);
    let x_train = standardized_rows(&stats, matrix, &train);
    let x_test = standardized_rows(&stats, matrix, &test);
    let y_train: Vec<usize> = train.iter().map(|&r| y[r]).collect();

    let mut predictions: Vec<Vec<usize>> = Vec::with_capacity(specs.len());
    let mut seconds = Vec::with_capacity(specs.len());
    let mut warnings = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        if let Some(j) = specs[..i].iter().position(|s| s == spec) {
            predictions.push(predictions[j].clone());
            seconds.push(seconds[j]);
            continue;
        }
        let stage = format!("fold {fold}, {} ({})", spec.kind().display_name(), spec.describe());
        let started = Instant::now();
        let model = spec
            .train(&x_train, &y_train, derive_seed(seed, &[fold as u64, i as u64]))
            .stage(&stage)?;
        seconds.push(started.elapsed().as_secs_f64());
        if let TrainedModel::Svm(m) = &model {
            if !m.converged {
                warnings.push(Warning::new(
                    "classifiers",
                    format!("{stage}: SMO stopped at the iteration cap after {} steps", m.iterations),
                ));
            }
        }
        predictions.push(model.predict_many(&x_test).stage(&stage)?);
    }
    Ok(FoldOutcome {
        test_rows: test,
        predictions,
        seconds,
        warnings,
    })
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    kind: ClassifierKind,
    configuration: String,
    predictions: Vec<usize>,
    y: &[usize],
    assignment: &FoldAssignment,
    n_classes: usize,
    seconds: f64,
    record_timings: bool,
) -> Result<ClassifierResult> {
    let cm = confusion(y, &predictions, n_classes)?;
    if cm.total() != y.len() {
        return Err(EvalError::Inconsistent(format!("pooled confusion holds {} of {} rows", cm.total(), y.len())).into());
    }
    let fold_accuracy = (0..assignment.k)
        .map(|f| {
            let rows = assignment.test_rows(f);
            let t: Vec<usize> = rows.iter().map(|&r| y[r]).collect();
            let p: Vec<usize> = rows.iter().map(|&r| predictions[r]).collect();
            confusion(&t, &p, n_classes).and_then(|cm| accuracy(&cm))
        })
        .collect::<std::result::Result<Vec<f64>, EvalError>>()?;
    Ok(ClassifierResult {
        kind,
        name: kind.display_name().to_string(),
        configuration,
        accuracy: accuracy(&cm)?,
        kappa: cohens_kappa(&cm)?,
        confusion: cm,
        mean_fold_accuracy: fold_accuracy.iter().sum::<f64>() / fold_accuracy.len() as f64,
        fold_accuracy,
        build_time_s: record_timings.then_some(seconds),
        predictions,
    })
}

/// Grouped k-fold evaluation of every configured classifier on one matrix.
/// `y` holds class indices aligned with the matrix rows.
pub fn cross_validate(
    matrix: &FeatureMatrix,
    y: &[usize],
    class_names: &[String],
    settings: &EvalSettings,
) -> Result<EvaluationReport> {
    let n = matrix.n_rows();
    if n == 0 {
        return Err(EvalError::EmptyDataset.into());
    }
    if y.len() != n {
        return Err(EvalError::LengthMismatch {
            truth: y.len(),
            predicted: n,
        }
        .into());
    }
    if settings.classifiers.is_empty() {
        return Err(EvalError::NoClassifiers.into());
    }
    let present: BTreeSet<usize> = y.iter().copied().collect();
    if present.len() < 2 {
        let only = present
            .first()
            .map(|&c| class_names.get(c).cloned().unwrap_or_else(|| c.to_string()))
            .unwrap_or_default();
        return Err(EvalError::SingleClass(only).into());
    }
    let n_classes = class_names.len().max(present.last().map_or(0, |m| m + 1));
    let assignment = grouped_kfold(&matrix.groups, settings.folds, settings.seed).stage("eval")?;

    let specs: Vec<ClassifierSpec> = settings.classifiers.iter().chain(&settings.grid).copied().collect();
    let outcomes = (0..assignment.k)
        .into_par_iter()
        .map(|fold| run_fold(matrix, y, &assignment, fold, &specs, settings.seed))
        .collect::<Result<Vec<_>>>()?;

    let mut predictions = vec![vec![usize::MAX; n]; specs.len()];
    let mut seconds = vec![0.0; specs.len()];
    let mut vote = vec![usize::MAX; n];
    let mut warnings = Vec::new();
    for o in &outcomes {
        for (s, preds) in o.predictions.iter().enumerate() {
            for (&r, &p) in o.test_rows.iter().zip(preds) {
                predictions[s][r] = p;
            }
            seconds[s] += o.seconds[s];
        }
        for (t, &r) in o.test_rows.iter().enumerate() {
            let ballot: Vec<(ClassifierKind, usize)> = settings
                .classifiers
                .iter()
                .enumerate()
                .map(|(s, spec)| (spec.kind(), o.predictions[s][t]))
                .collect();
            vote[r] = majority_vote(&ballot)?;
        }
        warnings.extend(o.warnings.iter().cloned());
    }
    if predictions.iter().flatten().any(|&p| p == usize::MAX) {
        return Err(EvalError::Inconsistent("a row was never in a test fold".into()).into());
    }

    let mut results = Vec::new();
    let mut grid = Vec::new();
    let mut timings = Vec::new();
    for (s, spec) in specs.iter().enumerate() {
        let r = summarize(
            spec.kind(),
            spec.describe(),
            std::mem::take(&mut predictions[s]),
            y,
            &assignment,
            n_classes,
            seconds[s],
            settings.record_timings,
        )?;
        timings.push(Timing {
            name: r.name.clone(),
            configuration: r.configuration.clone(),
            seconds: seconds[s],
        });
        if s < settings.classifiers.len() {
            results.push(r);
        } else {
            grid.push(r);
        }
    }
    if settings.vote {
        let total: f64 = seconds[..settings.classifiers.len()].iter().sum();
        let voters: Vec<&str> = settings.classifiers.iter().map(|s| s.kind().display_name()).collect();
        results.push(summarize(
            ClassifierKind::Vote,
            format!("over {}", voters.join(", ")),
            vote,
            y,
            &assignment,
            n_classes,
            total,
            settings.record_timings,
        )?);
    }

    let fold_breakdown = assignment
        .subjects(&matrix.groups)
        .into_iter()
        .enumerate()
        .map(|(fold, test_subjects)| {
            let n_test = assignment.fold_of.iter().filter(|&&f| f == fold).count();
            FoldSummary {
                fold,
                n_train: n - n_test,
                n_test,
                test_subjects,
            }
        })
        .collect();

    Ok(EvaluationReport {
        protocol: format!("{PROTOCOL} (k = {})", assignment.k),
        seed: settings.seed,
        folds: assignment.k,
        class_names: class_names.to_vec(),
        n_rows: n,
        n_features: matrix.n_cols(),
        n_subjects: matrix.groups.iter().collect::<BTreeSet<_>>().len(),
        results,
        grid,
        fold_breakdown,
        y_true: y.to_vec(),
        groups: matrix.groups.clone(),
        warnings,
        config: None,
        timings,
    })
}

/// Features and evaluation of one configured run.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub features: FeatureBuild,
    pub report: EvaluationReport,
}

/// Full pipeline: recordings → features → binary task → cross-validation.
pub fn run_experiment(config: &ExperimentConfig, manifest: &DatasetManifest) -> Result<Experiment> {
    if manifest.is_empty() {
        return Err(Error::from(EvalError::EmptyDataset).in_stage("ingest"));
    }
    let settings = config.eval_settings().stage("config")?;
    let features = extract_features(manifest, &config.pipeline_settings())?;
    let task = binary_task(&features.matrix, config.pd_class);
    if task.matrix.n_rows() == 0 {
        return Err(Error::from(EvalError::EmptyDataset).in_stage("eval"));
    }
    let mut report = cross_validate(&task.matrix, &task.y, &task.class_names, &settings)?;
    let mut warnings = features.warnings.clone();
    warnings.append(&mut report.warnings);
    report.warnings = warnings;
    report.config = Some(config.echo());
    Ok(Experiment { features, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CohortLabel;

    fn toy() -> (FeatureMatrix, Vec<usize>) {
        let mut m = FeatureMatrix::empty(vec!["a".into(), "b".into()]);
        let mut y = Vec::new();
        for s in 0..6 {
            for e in 0..4 {
                let c = s % 2;
                let t = (s * 4 + e) as f64;
                m.data.push(vec![c as f64 * 10.0 + (t * 0.7).sin(), 0.1 * (t * 1.3).cos()]);
                m.labels.push(if c == 0 {
                    CohortLabel::HealthyControl
                } else {
                    CohortLabel::PdOffMedication
                });
                m.groups.push(format!("s{s}"));
                y.push(c);
            }
        }
        (m, y)
    }

    #[test]
    fn separable_toy_is_learned() {
        let (m, y) = toy();
        let names = vec!["hc".to_string(), "pd_off".to_string()];
        let report = cross_validate(&m, &y, &names, &EvalSettings::all_defaults(3, 1)).unwrap();
        assert_eq!(report.results.len(), 8);
        for r in &report.results {
            assert_eq!(r.confusion.total(), 24);
            assert!(r.accuracy > 0.9, "{} {}", r.name, r.accuracy);
        }
        let again = cross_validate(&m, &y, &names, &EvalSettings::all_defaults(3, 1)).unwrap();
        assert_eq!(crate::eval::report::render_json(&report), crate::eval::report::render_json(&again));
    }

    #[test]
    fn binary_task_drops_other_cohort() {
        let (mut m, _) = toy();
        m.labels[0] = CohortLabel::PdOnMedication;
        let t = binary_task(&m, PdClass::PdOff);
        assert_eq!(t.matrix.n_rows(), 23);
        assert_eq!(t.class_names, ["hc", "pd_off"]);
    }

    #[test]
    fn seeds_differ_per_path() {
        assert_ne!(derive_seed(1, &[0, 0]), derive_seed(1, &[0, 1]));
        assert_ne!(derive_seed(1, &[1, 0]), derive_seed(1, &[0, 1]));
        assert_eq!(derive_seed(5, &[2, 3]), derive_seed(5, &[2, 3]));
    }
}
