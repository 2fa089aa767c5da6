use dwsafe::harness::run;
use dwsafe::scenario::{validate_scenario, Goal, Scenario};
use std::path::PathBuf;

fn load(name: &str) -> Scenario {
    Scenario::from_toml_path(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)).unwrap()
}

#[test]
fn shipped_scenarios_validate() {
    for name in ["passive_head_on.toml", "static_corridor.toml", "waypoint.toml", "intersection_deadline.toml"] {
        let s = load(name);
        assert!(validate_scenario(&s).is_empty(), "{name}: {:?}", validate_scenario(&s));
        assert_eq!(Scenario::from_toml_str(&s.to_toml_string().unwrap()).unwrap(), s);
    }
}

#[test]
fn static_corridor_never_touches() {
    let s = load("static_corridor.toml");
    let ep = run(&s).unwrap();
    assert!(ep.safe());
    assert!(ep.min_distance_moving > 1.0);
    assert!(ep.goal_distance.unwrap() < 0.5);
    for st in &ep.trace.steps {
        assert_eq!(st.pre.obstacles, s.obstacles);
    }
}

#[test]
fn passive_head_on_keeps_distance_while_moving() {
    let ep = run(&load("passive_head_on.toml")).unwrap();
    assert!(ep.safe());
    assert!(ep.min_distance_moving > 0.0);
}

#[test]
fn liveness_goals_are_routed_elsewhere() {
    let s = load("waypoint.toml");
    assert!(matches!(s.goal, Some(Goal::Waypoint(_))));
    assert!(run(&s).is_err());
}
