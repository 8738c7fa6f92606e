//! Run the default experiment end to end from its config file: ingest,
//! filtering, features, cross-validation and the comparison table.
//!
//! ```text
//! cargo run --release --example full_pipeline [-- CONFIG.toml]
//! ```

use std::path::PathBuf;

use pdeeg::config::ExperimentConfig;
use pdeeg::eval::report::render_text;
use pdeeg::eval::run_experiment;
use pdeeg::ingest::load_manifest;

fn main() -> pdeeg::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("config/default.toml"));
    let config = ExperimentConfig::load(&path)?;
    for finding in config.validate() {
        println!("{finding}");
    }
    let manifest = load_manifest(&config.manifest_path())?;
    let exp = run_experiment(&config, &manifest)?;
    print!("{}", render_text(&exp.report));
    for w in &exp.report.warnings {
        println!("{w}");
    }
    Ok(())
}
