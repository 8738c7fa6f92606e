//! The `pdeeg` command line: `validate`, `features` and `evaluate`.
//!
//! Exit codes: 0 on success, 1 when the config or manifest fails validation,
//! 2 when a run fails on the data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, Finding, Severity};
use crate::dsp::{clamp_band_edge, epoch_geometry};
use crate::error::{Error, StageContext};
use crate::eval::report::{render_json, render_plot_csv, render_text, render_timings_csv};
use crate::eval::{run_experiment, EvaluationReport};
use crate::ingest::{parse_manifest, read_bdf, DatasetManifest, RecordingFormat};
use crate::pipeline::extract_features;
use crate::warning::Warning;

/// Environment variable that overrides the config's output directory.
pub const OUT_DIR_ENV: &str = "PDEEG_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "pdeeg-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pdeeg", version, about = "EEG feature extraction and classifier comparison for PD screening")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the config and manifest without running anything.
    Validate(CommonArgs),
    /// Write the feature matrix CSV.
    Features(CommonArgs),
    /// Run cross-validation and write the reports.
    Evaluate(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; beats the environment and the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Only warnings and errors on the console.
    #[arg(long)]
    pub quiet: bool,
}

/// Options shared by the commands that write files.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    /// Already resolved; `None` falls back to the config, then [`DEFAULT_OUT_DIR`].
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub findings: Vec<Finding>,
}

impl Diagnostics {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn is_ok(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_ok() {
            EXIT_OK
        } else {
            EXIT_INVALID
        }
    }
}

/// Files written by `features` or `evaluate`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub features_csv: PathBuf,
    pub warnings_log: PathBuf,
    pub report_text: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
    pub plot_csv: Option<PathBuf>,
    pub timings_csv: Option<PathBuf>,
    pub warnings: Vec<Warning>,
    pub report: Option<EvaluationReport>,
}

impl RunArtifacts {
    pub fn paths(&self) -> Vec<&Path> {
        let mut out = vec![self.features_csv.as_path(), self.warnings_log.as_path()];
        for p in [&self.report_text, &self.report_json, &self.plot_csv, &self.timings_csv]
            .into_iter()
            .flatten()
        {
            out.push(p);
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("validation failed with {} error(s)", .0.errors().count())]
    Invalid(Diagnostics),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

/// `--out`, then the environment, then the config, then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(flag: Option<&Path>, env: Option<&str>, config: &ExperimentConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(e) = env.filter(|e| !e.is_empty()) {
        return PathBuf::from(e);
    }
    match &config.output_dir {
        Some(p) => config.resolve(p),
        None => PathBuf::from(DEFAULT_OUT_DIR),
    }
}

fn manifest_findings(config: &ExperimentConfig) -> (DatasetManifest, Vec<Finding>) {
    let path = config.manifest_path();
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            return (
                DatasetManifest::default(),
                vec![Finding::error("manifest", format!("cannot read {}: {e}", path.display()))],
            )
        }
    };
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let (manifest, errors) = parse_manifest(&text, base, true);
    let location = format!("manifest {}", path.display());
    let mut findings: Vec<Finding> = errors.iter().map(|e| Finding::error(&location, e.to_string())).collect();
    if manifest.is_empty() && findings.is_empty() {
        findings.push(Finding::error(location, "no recordings listed"));
    }
    (manifest, findings)
}

/// Checks that depend on each recording's sampling rate: band edges after
/// clamping and the epoch length. One clamp finding is reported per
/// (requested edge, rate) however many bands share it.
fn rate_findings(config: &ExperimentConfig, manifest: &DatasetManifest) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut rates: BTreeMap<u64, f64> = BTreeMap::new();
    for entry in &manifest.entries {
        let fs = match entry.format {
            RecordingFormat::Csv => config.csv_sampling_rate_hz,
            RecordingFormat::Bdf => match read_bdf(&entry.path) {
                Ok(b) => b.sampling_rate_hz,
                Err(e) => {
                    out.push(Finding::error(entry.path.display().to_string(), e.to_string()));
                    continue;
                }
            },
        };
        if fs > 0.0 {
            rates.insert(fs.to_bits(), fs);
        }
    }

    let f = &config.filter;
    let mut edges: Vec<(String, f64, f64)> = Vec::new();
    if f.bandpass {
        edges.push(("filter.bandpass_hi_hz".into(), f.bandpass_lo_hz, f.bandpass_hi_hz));
    }
    for (i, b) in config.bands.iter().enumerate() {
        edges.push((format!("bands[{i}] ({})", b.name), b.lo_hz, b.hi_hz));
    }

    for &fs in rates.values() {
        if f.notch && f.notch_hz >= fs / 2.0 {
            out.push(Finding::error(
                "filter.notch_hz",
                format!("{} Hz is not below Nyquist at {fs} Hz", f.notch_hz),
            ));
        }
        let (len, _) = epoch_geometry(fs, config.epochs.seconds, config.epochs.overlap);
        if config.epochs.seconds > 0.0 && len < 16 {
            out.push(Finding::error(
                "epochs.seconds",
                format!("epochs of {len} samples at {fs} Hz are shorter than the 16-sample minimum"),
            ));
        }
        let mut clamped: BTreeMap<u64, (f64, f64, Vec<&str>)> = BTreeMap::new();
        for (loc, lo, hi) in &edges {
            let (eff, moved) = clamp_band_edge(*hi, fs);
            if *lo >= eff {
                out.push(Finding::error(
                    loc.as_str(),
                    format!("lower edge {lo} Hz is not below the clamped upper edge {eff} Hz at {fs} Hz"),
                ));
            } else if moved {
                clamped.entry(hi.to_bits()).or_insert((*hi, eff, Vec::new())).2.push(loc);
            }
        }
        for (hi, eff, locs) in clamped.into_values() {
            out.push(Finding::warning(
                locs.join(", "),
                format!("{hi} Hz exceeds 0.99 x Nyquist at {fs} Hz; clamped to {eff} Hz"),
            ));
        }
    }
    out
}

/// Full static check of a config file and the manifest it names.
pub fn cmd_validate(config_path: &Path) -> Diagnostics {
    let config = match ExperimentConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            return Diagnostics {
                findings: vec![Finding::error(config_path.display().to_string(), e.to_string())],
            }
        }
    };
    validate_loaded(&config).0
}

fn validate_loaded(config: &ExperimentConfig) -> (Diagnostics, DatasetManifest) {
    let mut findings = config.validate();
    let (manifest, mut m) = manifest_findings(config);
    findings.append(&mut m);
    if findings.iter().all(|f| f.severity != Severity::Error) {
        findings.extend(rate_findings(config, &manifest));
    }
    (Diagnostics { findings }, manifest)
}

fn prepare(config_path: &Path, opts: &RunOptions) -> Result<(ExperimentConfig, DatasetManifest, PathBuf), CliError> {
    let config = ExperimentConfig::load(config_path)
        .map_err(|e| CliError::Invalid(Diagnostics {
            findings: vec![Finding::error(config_path.display().to_string(), e.to_string())],
        }))?
        .with_seed(opts.seed);
    let mut findings = config.validate();
    let (manifest, mut m) = manifest_findings(&config);
    findings.append(&mut m);
    let diagnostics = Diagnostics { findings };
    if !diagnostics.is_ok() {
        return Err(CliError::Invalid(diagnostics));
    }
    let out_dir = opts.out_dir.clone().unwrap_or_else(|| resolve_out_dir(None, None, &config));
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    Ok((config, manifest, out_dir))
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> crate::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    let io = |e| Error::io(path, e);
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

fn warnings_text(warnings: &[Warning]) -> String {
    let mut out = String::new();
    for w in warnings {
        let _ = writeln!(out, "{w}");
    }
    out
}

fn empty_artifacts(out_dir: &Path) -> RunArtifacts {
    RunArtifacts {
        out_dir: out_dir.to_path_buf(),
        features_csv: out_dir.join("features.csv"),
        warnings_log: out_dir.join("warnings.log"),
        report_text: None,
        report_json: None,
        plot_csv: None,
        timings_csv: None,
        warnings: Vec::new(),
        report: None,
    }
}

/// Run ingest through feature extraction and write `features.csv` and
/// `warnings.log`.
pub fn cmd_features(config_path: &Path, opts: &RunOptions) -> Result<RunArtifacts, CliError> {
    let (config, manifest, out_dir) = prepare(config_path, opts)?;
    let build = extract_features(&manifest, &config.pipeline_settings())?;
    let mut art = empty_artifacts(&out_dir);
    write_atomic(&art.features_csv, &build.matrix.to_csv_string()).stage("output")?;
    write_atomic(&art.warnings_log, &warnings_text(&build.warnings)).stage("output")?;
    art.warnings = build.warnings;
    Ok(art)
}

/// Full experiment: features, cross-validation and every report file.
pub fn cmd_evaluate(config_path: &Path, opts: &RunOptions) -> Result<RunArtifacts, CliError> {
    let (config, manifest, out_dir) = prepare(config_path, opts)?;
    let exp = run_experiment(&config, &manifest)?;
    let mut art = empty_artifacts(&out_dir);
    art.report_text = Some(out_dir.join("report.txt"));
    art.report_json = Some(out_dir.join("report.json"));
    art.plot_csv = Some(out_dir.join("accuracy_plot.csv"));
    if config.evaluation.record_timings {
        art.timings_csv = Some(out_dir.join("timings.csv"));
    }

    write_atomic(&art.features_csv, &exp.features.matrix.to_csv_string()).stage("output")?;
    let report = &exp.report;
    let files = [
        (&art.report_text, render_text(report)),
        (&art.report_json, render_json(report)),
        (&art.plot_csv, render_plot_csv(report)),
        (&art.timings_csv, render_timings_csv(report)),
    ];
    for (path, text) in files {
        if let Some(p) = path {
            write_atomic(p, &text).stage("output")?;
        }
    }
    write_atomic(&art.warnings_log, &warnings_text(&report.warnings)).stage("output")?;
    art.warnings = report.warnings.clone();
    art.report = Some(exp.report);
    Ok(art)
}

fn print_failure(err: &CliError) {
    match err {
        CliError::Invalid(d) => {
            for f in &d.findings {
                eprintln!("{f}");
            }
            eprintln!("{err}");
        }
        CliError::Runtime(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
        }
    }
}

fn finish(result: Result<RunArtifacts, CliError>, quiet: bool) -> i32 {
    match result {
        Ok(art) => {
            for w in &art.warnings {
                eprintln!("{w}");
            }
            if !quiet {
                if let Some(p) = &art.report_text {
                    if let Ok(text) = std::fs::read_to_string(p) {
                        print!("{text}");
                    }
                }
                for p in art.paths() {
                    println!("wrote {}", p.display());
                }
            }
            EXIT_OK
        }
        Err(e) => {
            print_failure(&e);
            e.exit_code()
        }
    }
}

fn run_options(args: &CommonArgs) -> Result<RunOptions, CliError> {
    let env = std::env::var(OUT_DIR_ENV).ok();
    let out_dir = match (&args.out, env.as_deref()) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(e)) if !e.is_empty() => Some(PathBuf::from(e)),
        _ => None,
    };
    Ok(RunOptions {
        seed: args.seed,
        out_dir,
    })
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Validate(a) => {
            let d = cmd_validate(&a.config);
            for f in &d.findings {
                eprintln!("{f}");
            }
            if !a.quiet {
                println!(
                    "{}: {} error(s), {} warning(s)",
                    a.config.display(),
                    d.errors().count(),
                    d.warnings().count()
                );
            }
            d.exit_code()
        }
        Command::Features(a) => {
            let r = run_options(&a).and_then(|o| cmd_features(&a.config, &o));
            finish(r, a.quiet)
        }
        Command::Evaluate(a) => {
            let r = run_options(&a).and_then(|o| cmd_evaluate(&a.config, &o));
            finish(r, a.quiet)
        }
    }
}
