//! Build the epoch-level feature matrix for the shipped fixture and write it
//! as CSV.
//!
//! ```text
//! cargo run --example feature_matrix [-- OUT.csv]
//! ```

use std::path::{Path, PathBuf};

use pdeeg::ingest::load_manifest;
use pdeeg::pipeline::{extract_features, PipelineSettings};

fn main() -> pdeeg::Result<()> {
    let manifest_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic/manifest.tsv");
    let manifest = load_manifest(&manifest_path)?;
    let build = extract_features(&manifest, &PipelineSettings::default())?;
    let m = &build.matrix;
    println!("{} rows x {} feature columns (+ label, subject)", m.n_rows(), m.n_cols());
    println!("first columns: {}", m.names[..4].join(", "));
    println!("kurtosis sentinels: {}", build.sentinel_cells.len());
    for w in &build.warnings {
        println!("{w}");
    }
    if let Some(out) = std::env::args_os().nth(1).map(PathBuf::from) {
        m.write_csv(&out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
