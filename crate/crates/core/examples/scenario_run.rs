//! Loads a scenario file, runs the stationary study and writes its CSV files.
//!
//! ```text
//! cargo run --example scenario_run -- crates/core/scenarios/default.toml out/
//! ```

use std::path::PathBuf;

use seglab::lab::{resolve_out_dir, run_stationary, LabRun, Scenario};

fn main() -> seglab::Result<()> {
    let mut args = std::env::args().skip(1);
    let sc = match args.next() {
        Some(path) => Scenario::load(path)?,
        None => Scenario::builtin_default(),
    };
    let dir = resolve_out_dir(args.next().map(PathBuf::from));
    let run = run_stationary(&sc)?;
    for f in run.write(&dir)? {
        println!("wrote {}", f.display());
    }
    for c in &run.report.checks {
        println!("{c}");
    }
    Ok(())
}
