//! Static validation of a config and its manifest, as `pdeeg validate` does.
//!
//! ```text
//! cargo run --example validate_config [-- CONFIG.toml]
//! ```

use std::path::PathBuf;

use pdeeg::cli::cmd_validate;

fn main() {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("config/default.toml"));
    let diagnostics = cmd_validate(&path);
    for f in &diagnostics.findings {
        println!("{f}");
    }
    println!(
        "{} error(s), {} warning(s)",
        diagnostics.errors().count(),
        diagnostics.warnings().count()
    );
    std::process::exit(diagnostics.exit_code());
}
