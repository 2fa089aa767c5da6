//! Margin mutation: scaling the controller's safety threshold by kappa < 1
//! lets a head-on obstacle reach it; the verified controller (kappa = 1)
//! survives the same search.
//!
//! cargo run --release --example falsify_margin [budget]

use dwsafe::falsify::{falsify, mutate_margin, FalsifyConfig};
use dwsafe::scenario::Scenario;
use dwsafe::state::{ObstaclePolicyKind, ObstacleState, SafetyMode, WorldParams};
use dwsafe::Vec2;

fn main() -> dwsafe::Result<()> {
    let budget: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let mut template = Scenario::new(SafetyMode::Passive, WorldParams::default());
    template.policy = ObstaclePolicyKind::HeadOn;
    template.horizon = 10.0;
    template.obstacles = vec![ObstacleState::new(Vec2::new(5.0, 0.0), Vec2::ZERO, 1.0)];

    for kappa in [0.25, 0.5, 0.75, 0.9, 1.0] {
        let m = mutate_margin(SafetyMode::Passive, kappa)?;
        let threshold = m.threshold(1.0, &template.params)?;
        let res = falsify(&m.apply(&template), FalsifyConfig::new(budget, 42))?;
        println!(
            "kappa {kappa:>4}: guard at v=1 is {threshold:.5} m; found={} after {} trials; closest {:.3e} m",
            res.found, res.trials, res.best_objective
        );
    }
    Ok(())
}
