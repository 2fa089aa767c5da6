//! Minimum safe distances and maximum velocities for the reference robot
//! configurations, plus a custom configuration.
//!
//! cargo run --example safety_tables

use dwsafe::state::{SafetyMode, WorldParams};
use dwsafe::tables::{custom_table, reference_tables};

fn main() -> dwsafe::Result<()> {
    for table in reference_tables()? {
        println!("{table}");
    }

    // A slower controller loop on a heavier robot.
    let params = WorldParams { a_max: 0.5, b: 0.8, eps: 0.2, v_obs: 0.5, ..WorldParams::default() };
    for mode in [SafetyMode::Static, SafetyMode::Passive, SafetyMode::PassiveFriendly] {
        println!("{}", custom_table(mode, &params, &[0.5, 1.0, 1.5], &[0.5, 1.25, 3.0])?);
    }
    Ok(())
}
