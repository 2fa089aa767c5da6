//! Cross an intersection ahead of or behind a vehicle on the crossing road
//! that keeps a minimum speed, with and without a deadline.
//!
//! cargo run --release --example intersection

use dwsafe::liveness::{
    liveness_grid, pass_behind, pass_front, run_intersection, run_liveness_cases, CrossingState, LineState,
    LivenessKind,
};
use dwsafe::scenario::IntersectionGoal;
use dwsafe::state::WorldParams;
use dwsafe::Vec2;

fn main() {
    let params = WorldParams { v_min: 0.2, ..WorldParams::default() };
    let goal = IntersectionGoal { p_x: Vec2::ZERO, deadline: None };
    for (robot_p, robot_v, obstacle_p) in [(-2.0, 1.5, -8.0), (-6.0, 0.5, -1.0), (-4.0, 0.5, -4.0)] {
        let start = CrossingState {
            robot: LineState { p: robot_p, v: robot_v },
            obstacle: LineState { p: obstacle_p, v: 0.5 },
        };
        let o = run_intersection(start, &goal, &params, 7, 120.0);
        println!(
            "robot at x={robot_p} ({robot_v} m/s), obstacle at y={obstacle_p}: front={} behind={} -> passed={} closest {:.3} m",
            pass_front(&start, &goal, &params),
            pass_behind(&start, &goal, &params),
            o.passed,
            o.min_distance_moving
        );
    }
    for kind in [LivenessKind::Intersection, LivenessKind::IntersectionDeadline] {
        println!("{}", run_liveness_cases(kind, &liveness_grid(kind, 100, 0)));
    }
}
