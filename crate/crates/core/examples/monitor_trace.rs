//! Check a simulated trace with the controller monitor, then inject faults
//! and see which clause catches each. The faulty traces are written as CSV
//! for use with `dwsafe check-trace`.
//!
//! cargo run --example monitor_trace

use dwsafe::harness::{run, sample_scenario};
use dwsafe::monitor::{check_trace, MonitorMode};
use dwsafe::state::{ObstaclePolicyKind, Refinements, SafetyMode};
use dwsafe::trace::Trace;
use dwsafe::Vec2;
type Fault = fn(&mut Trace, usize, f64, f64);

fn main() -> dwsafe::Result<()> {
    let s = sample_scenario(SafetyMode::Passive, Refinements::empty(), ObstaclePolicyKind::Pursuit, 3);
    let p = s.params;
    let trace = run(&s)?.trace;
    for mode in [MonitorMode::Strict, MonitorMode::Relaxed] {
        println!("{}", check_trace(&trace, &p, mode));
    }

    let faults: [(&str, Fault); 3] = [
        ("teleport", |t, k, _, _| t.steps[k].post.robot.p_r.x += 1.0),
        ("over_acceleration", |t, k, a, _| t.steps[k].post.robot.a_r = a + 0.5),
        ("obstacle_overspeed", |t, k, _, v| t.steps[k].post.obstacles[0].v_o = Vec2::new(0.0, v + 0.1)),
    ];
    for (i, (name, inject)) in faults.into_iter().enumerate() {
        let step = 20 + 10 * i;
        let mut faulty = trace.clone();
        inject(&mut faulty, step, p.a_max, p.v_obs);
        let rep = check_trace(&faulty, &p, MonitorMode::Relaxed);
        let at = rep.first_failure.expect("fault is caught");
        println!("{name} injected at step {step}: first failure at {at}, clauses {:?}", rep.verdicts[at].clause_ids());
        let path = std::env::temp_dir().join(format!("dwsafe_fault_{name}.csv"));
        faulty.write_csv_path(&path)?;
        println!("  written to {}", path.display());
    }
    Ok(())
}
