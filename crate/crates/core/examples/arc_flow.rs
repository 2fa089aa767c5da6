//! Closed-form circular-arc motion: accelerate on a curve, brake to a stop,
//! and check the differential invariants over each interval.
//!
//! cargo run --example arc_flow

use dwsafe::dynamics::{check_differential_invariants, flow_robot};
use dwsafe::state::RobotState;
use dwsafe::Vec2;

fn main() -> dwsafe::Result<()> {
    let mut robot = RobotState::moving(Vec2::ZERO, Vec2::new(1.0, 0.0), 0.5, 2.0);
    println!("{:>6} {:>9} {:>9} {:>7} {:>8} {:>7}", "t", "x", "y", "v", "beta", "dinv");
    let mut t = 0.0;
    for (a, dt) in [(1.0, 0.5), (1.0, 0.5), (0.0, 1.0), (-1.0, 0.8), (-1.0, 2.0)] {
        let step = flow_robot(&robot, a, dt)?;
        let inv = check_differential_invariants(&robot, &step.post, a, 0.0, &[], &[], dt);
        t += step.elapsed;
        let post = step.post;
        println!(
            "{t:>6.2} {:>9.4} {:>9.4} {:>7.3} {:>8.4} {:>7}",
            post.p_r.x,
            post.p_r.y,
            post.v_r,
            post.beta,
            if inv.ok() { "ok" } else { "FAIL" }
        );
        if let Some(ts) = step.stopped_at {
            println!("stopped {ts:.3} s into the last interval");
        }
        robot = RobotState { t: 0.0, ..post };
    }
    // The robot stays on its circle throughout.
    println!("distance from center: {:.12} (radius 2)", (robot.p_r - robot.p_c).norm_2());
    Ok(())
}
