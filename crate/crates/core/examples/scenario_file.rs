//! Load a scenario file, validate it, apply overrides and run it.
//!
//! cargo run --example scenario_file [path] [KEY=VALUE ...]

use dwsafe::harness::run;
use dwsafe::scenario::{validate_scenario, Scenario};
use std::path::PathBuf;

fn main() -> dwsafe::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/passive_head_on.toml"));
    let overrides: Vec<String> = args.collect();
    let mut s = Scenario::from_toml_path(&path)?;
    s.params.apply_overrides(&overrides)?;
    let problems = validate_scenario(&s);
    if !problems.is_empty() {
        println!("invalid: {}", problems.join("; "));
        return Ok(());
    }
    let ep = run(&s)?;
    println!("{}: {} steps, {} violations, closest while moving {:.4} m", path.display(), ep.steps, ep.violations.len(), ep.min_distance_moving);
    println!("{}", s.to_toml_string()?);
    Ok(())
}
