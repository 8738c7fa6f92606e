//! Text, JSON and CSV renderings of an [`EvaluationReport`].

use std::fmt::Write;

use super::{ClassifierResult, EvaluationReport};

fn time_cell(r: &ClassifierResult) -> String {
    r.build_time_s.map_or_else(|| "-".to_string(), |s| format!("{s:.2}"))
}

/// Aligned table in the layout of the published comparison: one row per
/// classifier with pooled accuracy (%, one decimal), kappa and build time.
pub fn render_text(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Comparison of diagnostic accuracy (%)");
    let _ = writeln!(out, "protocol: {}", report.protocol);
    let classes: Vec<String> = report
        .class_names
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{c} ({i})"))
        .collect();
    let _ = writeln!(
        out,
        "data: {} epochs, {} subjects, {} features; classes {}; seed {}",
        report.n_rows,
        report.n_subjects,
        report.n_features,
        classes.join(" vs "),
        report.seed
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<16}{:>12}{:>10}{:>16}", "Method", "Accuracy(%)", "Kappa", "Build time (s)");
    for r in &report.results {
        let _ = writeln!(
            out,
            "{:<16}{:>12.1}{:>10.4}{:>16}",
            r.name,
            100.0 * r.accuracy,
            r.kappa,
            time_cell(r)
        );
    }
    if !report.grid.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "Hyperparameter grid");
        let _ = writeln!(
            out,
            "{:<12}{:<28}{:>22}{:>17}{:>26}",
            "Classifier", "Configuration", "Correctly Classified", "Kappa Statistic", "Time to build model (s)"
        );
        for r in &report.grid {
            let _ = writeln!(
                out,
                "{:<12}{:<28}{:>20.2} %{:>17.4}{:>26}",
                r.name,
                r.configuration,
                100.0 * r.accuracy,
                r.kappa,
                time_cell(r)
            );
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Per-fold accuracy (%)");
    for r in &report.results {
        let folds: Vec<String> = r.fold_accuracy.iter().map(|a| format!("{:.1}", 100.0 * a)).collect();
        let _ = writeln!(
            out,
            "{:<16}{}  (mean {:.1})",
            r.name,
            folds.join(" "),
            100.0 * r.mean_fold_accuracy
        );
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "{} warning(s); see the warnings log", report.warnings.len());
    }
    out
}

pub fn render_json(report: &EvaluationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"));
    s.push('\n');
    s
}

/// `classifier,accuracy` rows (accuracy in percent) for an accuracy bar chart.
pub fn render_plot_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("classifier,accuracy\n");
    for r in &report.results {
        let _ = writeln!(out, "{},{:.3}", r.name, 100.0 * r.accuracy);
    }
    out
}

pub fn render_timings_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("classifier,configuration,seconds\n");
    for t in &report.timings {
        let _ = writeln!(out, "{},\"{}\",{:.6}", t.name, t.configuration.replace('"', "\"\""), t.seconds);
    }
    out
}

/// Recover `(method, accuracy %)` pairs from a rendered text table.
pub fn parse_text_accuracies(text: &str) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    let mut in_table = false;
    for line in text.lines() {
        if line.starts_with("Method") {
            in_table = true;
            continue;
        }
        if !in_table {
            continue;
        }
        if line.trim().is_empty() {
            break;
        }
        let name = line.get(..16).unwrap_or(line).trim().to_string();
        let acc = line
            .get(16..28)
            .and_then(|s| s.trim().parse::<f64>().ok())
            .unwrap_or(f64::NAN);
        out.push((name, acc));
    }
    out
}
