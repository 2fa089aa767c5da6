//! Passive orientation safety: the robot only sees obstacles inside a
//! sector of width gamma around its heading and limits how far it turns.
//!
//! cargo run --release --example orientation

use dwsafe::harness::{run, sample_scenario};
use dwsafe::safety::visibility;
use dwsafe::state::{ObstaclePolicyKind, Refinements, RobotState, SafetyMode};
use dwsafe::Vec2;
use std::f64::consts::PI;

fn main() -> dwsafe::Result<()> {
    let robot = RobotState::at_rest(Vec2::ZERO, Vec2::new(1.0, 0.0), 1e6);
    for gamma in [PI / 3.0, PI / 2.0, PI] {
        let seen: Vec<bool> = [Vec2::new(2.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 2.0), Vec2::new(-2.0, 0.0)]
            .into_iter()
            .map(|p| visibility(&robot, p, gamma))
            .collect();
        println!("gamma = {:.0} deg: ahead/diagonal/side/behind visible = {:?}", gamma.to_degrees(), seen);
    }

    let mut invisible_contacts = 0;
    let mut violations = 0;
    for seed in 0..50 {
        let s = sample_scenario(SafetyMode::PassiveOrientation, Refinements::empty(), ObstaclePolicyKind::HeadOn, seed);
        let ep = run(&s)?;
        violations += ep.violations.len();
        if ep.min_distance_moving < 1e-6 {
            invisible_contacts += 1;
        }
    }
    println!("50 head-on episodes: {violations} violations; {invisible_contacts} with contact by obstacles outside the sector");
    Ok(())
}
