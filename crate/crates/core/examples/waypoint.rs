//! Reach a waypoint and stop inside its goal region, untimed and against a
//! deadline, then a grid of random feasible configurations.
//!
//! cargo run --release --example waypoint

use dwsafe::liveness::{liveness_grid, run_liveness_cases, run_waypoint, LineState, LivenessKind};
use dwsafe::scenario::WaypointGoal;
use dwsafe::state::WorldParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let params = WorldParams { v_goal: 1.0, delta_goal: 0.5, ..WorldParams::default() };
    let start = LineState { p: 0.0, v: 0.0 };
    let untimed = WaypointGoal { p_g: 10.0, deadline: None };
    let o = run_waypoint(start, &untimed, &params, None, 60.0);
    println!("untimed: stopped inside = {} at p = {:.3} after {:.2} s", o.stopped_inside, o.final_state.p, o.time);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let timed = WaypointGoal { p_g: 10.0, deadline: Some(12.0) };
    let o = run_waypoint(start, &timed, &params, Some(&mut rng), 60.0);
    println!("deadline 12 s, random cycle times: success = {}, deadline met = {:?}", o.success(), o.deadline_met);

    for kind in [LivenessKind::Waypoint, LivenessKind::WaypointDeadline] {
        println!("{}", run_liveness_cases(kind, &liveness_grid(kind, 100, 0)));
    }
}
