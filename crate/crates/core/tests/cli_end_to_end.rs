mod common;

use std::path::Path;
use std::process::Command;

use pdeeg::cli::{cmd_evaluate, cmd_features, cmd_validate, CliError, RunOptions, EXIT_INVALID};
use pdeeg::config::Severity;
use pdeeg::error::Error;
use pdeeg::eval::report::parse_text_accuracies;
use pdeeg::eval::EvalError;

fn opts(out: &Path, seed: Option<u64>) -> RunOptions {
    RunOptions {
        seed,
        out_dir: Some(out.to_path_buf()),
    }
}

fn root_error(e: &Error) -> &Error {
    match e {
        Error::Stage { source, .. } => root_error(source),
        other => other,
    }
}

#[test]
fn default_config_validates_with_one_warning() {
    let d = cmd_validate(&common::default_config_path());
    assert_eq!(d.errors().count(), 0, "{:?}", d.findings);
    let warnings: Vec<_> = d.warnings().collect();
    assert_eq!(warnings.len(), 1, "{warnings:?}");
    assert!(warnings[0].location.contains("gamma"));
    assert!(warnings[0].message.contains("63.36"));
}

#[test]
fn unknown_classifier_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::write_config(dir.path(), &common::fixture_dir().join("manifest.tsv"), "");
    let text = std::fs::read_to_string(&cfg).unwrap().replace("\"svm\", \"vote\"", "\"svm\", \"mlp\", \"vote\"");
    std::fs::write(&cfg, text).unwrap();
    let d = cmd_validate(&cfg);
    assert_eq!(d.exit_code(), EXIT_INVALID);
    assert!(d.errors().any(|f| f.location == "evaluation.classifiers" && f.message.contains("mlp")));
}

#[test]
fn missing_recording_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.tsv");
    std::fs::write(&manifest, "gone.bdf\tbdf\ts1\thc\n").unwrap();
    let cfg = common::write_config(dir.path(), &manifest, "");
    let d = cmd_validate(&cfg);
    let err = d.errors().next().unwrap();
    assert_eq!(err.severity, Severity::Error);
    assert!(err.message.contains("gone.bdf"), "{err}");
    assert!(matches!(cmd_features(&cfg, &opts(dir.path(), None)), Err(CliError::Invalid(_))));
}

#[test]
fn two_subject_feature_csv() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_manifest(
        dir.path(),
        &[("hc02.bdf", "bdf", "hc02", "hc"), ("pd01.bdf", "bdf", "pd01", "pd_off")],
    );
    let cfg = common::write_config(dir.path(), &manifest, "");
    let out = dir.path().join("out");
    let art = cmd_features(&cfg, &opts(&out, None)).unwrap();
    let csv = std::fs::read_to_string(&art.features_csv).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 5 * 2 * 8 + 2);
    assert_eq!(csv.lines().count(), 1 + 2 * 15);
    let first = csv.clone();
    cmd_features(&cfg, &opts(&out, None)).unwrap();
    assert_eq!(std::fs::read_to_string(&art.features_csv).unwrap(), first);
    let log = std::fs::read_to_string(&art.warnings_log).unwrap();
    assert!(log.contains("gamma"));
}

#[test]
fn empty_manifest_is_an_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.tsv");
    std::fs::write(&manifest, "# nothing here\n").unwrap();
    let cfg = common::write_config(dir.path(), &manifest, "");
    assert!(cmd_validate(&cfg).errors().any(|f| f.message.contains("no recordings")));
    let ds = pdeeg::ingest::DatasetManifest::default();
    let err = pdeeg::pipeline::extract_features(&ds, &Default::default()).unwrap_err();
    assert!(matches!(root_error(&err), Error::Eval(EvalError::EmptyDataset)));
}

#[test]
fn evaluate_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let art = cmd_evaluate(&common::default_config_path(), &opts(dir.path(), Some(7))).unwrap();
    for p in art.paths() {
        let text = std::fs::read_to_string(p).unwrap();
        assert!(text.is_empty() || text.ends_with('\n'), "{}", p.display());
    }
    let report = std::fs::read_to_string(art.report_text.as_ref().unwrap()).unwrap();
    let rows = parse_text_accuracies(&report);
    let names: Vec<&str> = rows.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["KNN", "LDA", "QDA", "NB", "DT", "RF", "SVM", "Majority Vote"]);
    assert!(rows.iter().all(|(_, a)| (0.0..=100.0).contains(a)));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(art.report_json.as_ref().unwrap()).unwrap()).unwrap();
    assert_eq!(json["seed"], 7);
    assert!(json["config"].get("output_dir").is_none());
    let plot = std::fs::read_to_string(art.plot_csv.as_ref().unwrap()).unwrap();
    assert_eq!(plot.lines().count(), 9);
}

#[test]
fn seed_changes_folds_but_reruns_match() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let cfg = common::default_config_path();
    cmd_evaluate(&cfg, &opts(a.path(), Some(7))).unwrap();
    cmd_evaluate(&cfg, &opts(b.path(), Some(7))).unwrap();
    cmd_evaluate(&cfg, &opts(c.path(), Some(8))).unwrap();
    for f in ["report.txt", "report.json", "features.csv", "accuracy_plot.csv", "warnings.log"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert_ne!(
        std::fs::read(a.path().join("report.json")).unwrap(),
        std::fs::read(c.path().join("report.json")).unwrap()
    );
}

#[test]
fn binary_exit_codes_and_out_dir_env() {
    let bin = env!("CARGO_BIN_EXE_pdeeg");
    let cfg = common::default_config_path();
    let ok = Command::new(bin).args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stderr).contains("63.36"));

    let bad = Command::new(bin).args(["evaluate", "--config", "/no/such/config.toml"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));

    // an unreadable recording fails at run time
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.bdf");
    std::fs::write(&junk, b"not a bdf file").unwrap();
    let manifest = dir.path().join("manifest.tsv");
    std::fs::write(&manifest, format!("{}\tbdf\ts1\thc\n", junk.display())).unwrap();
    let cfg2 = common::write_config(dir.path(), &manifest, "");
    let runtime = Command::new(bin).args(["features", "--quiet", "--config"]).arg(&cfg2).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(runtime.status.code(), Some(2), "{}", String::from_utf8_lossy(&runtime.stderr));
    assert!(String::from_utf8_lossy(&runtime.stderr).contains("junk.bdf"));

    let out = dir.path().join("from-env");
    let run = Command::new(bin)
        .env("PDEEG_OUT_DIR", &out)
        .args(["features", "--quiet", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(run.stdout.is_empty());
    assert!(out.join("features.csv").is_file());
    assert!(String::from_utf8_lossy(&run.stderr).contains("warning[dsp]"));
}
