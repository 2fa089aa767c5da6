//! Passive safety against each obstacle policy on randomized scenarios, and
//! one trace written as CSV.
//!
//! cargo run --release --example passive_pursuit [episodes]

use dwsafe::harness::{run, run_batch, sample_scenario, RunOptions};
use dwsafe::state::{ObstaclePolicyKind, Refinements, SafetyMode};

fn main() -> dwsafe::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let opts = RunOptions { record: false, ..RunOptions::default() };
    for policy in ObstaclePolicyKind::ALL.iter().copied() {
        let scenarios: Vec<_> = (0..n)
            .map(|seed| sample_scenario(SafetyMode::Passive, Refinements::empty(), policy, seed))
            .collect();
        let (mut violations, mut closest, mut stops) = (0, f64::INFINITY, 0);
        for ep in run_batch(&scenarios, opts) {
            let ep = ep?;
            violations += ep.violations.len();
            closest = closest.min(ep.min_distance_moving);
            stops += ep.stops;
        }
        println!("{policy:>14}: {n} episodes, {violations} violations, closest while moving {closest:.4} m, {stops} stops");
    }

    let s = sample_scenario(SafetyMode::Passive, Refinements::empty(), ObstaclePolicyKind::Pursuit, 0);
    let ep = run(&s)?;
    let path = std::env::temp_dir().join("dwsafe_pursuit.csv");
    ep.trace.write_csv_path(&path)?;
    println!("trace of {} steps written to {}", ep.steps, path.display());
    Ok(())
}
