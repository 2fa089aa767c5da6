//! The passive controller with each model refinement: uncertainty,
//! actuator disturbance, non-synchronized obstacles, many obstacles.
//!
//! cargo run --release --example refinements [episodes]

use dwsafe::harness::{run_batch, sample_scenario, RunOptions};
use dwsafe::state::{ObstaclePolicyKind, Refinement, Refinements, SafetyMode};

fn main() -> dwsafe::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let opts = RunOptions { record: false, ..RunOptions::default() };
    println!("{:>22} {:>10} {:>10} {:>12} {:>10}", "refinement", "episodes", "violations", "closest [m]", "inv fails");
    for r in Refinement::ALL.iter().copied() {
        let refs = Refinements::of(&[r]);
        let scenarios: Vec<_> = (0..n)
            .map(|seed| sample_scenario(SafetyMode::Passive, refs, ObstaclePolicyKind::Pursuit, seed))
            .collect();
        let (mut v, mut closest, mut inv) = (0, f64::INFINITY, 0);
        for ep in run_batch(&scenarios, opts) {
            let ep = ep?;
            v += ep.violations.len();
            closest = closest.min(ep.min_distance_moving);
            inv += ep.invariant_failures.len() + ep.diff_failures.len();
        }
        println!("{:>22} {n:>10} {v:>10} {closest:>12.4} {inv:>10}", r.as_str());
    }
    Ok(())
}
