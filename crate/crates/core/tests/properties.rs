use dwsafe::dynamics::flow_robot;
use dwsafe::falsify::{falsify, FalsifyConfig};
use dwsafe::harness::{observe, run, sample_scenario};
use dwsafe::monitor::{eval_monitor, MonitorMode};
use dwsafe::safety::{max_velocity, safe_distance, SafetyQuery};
use dwsafe::scenario::Scenario;
use dwsafe::state::{
    ObstaclePolicyKind, ObstacleState, Refinement, Refinements, RobotState, SafetyMode, WorldParams,
};
use dwsafe::trace::{Sample, Trace, TraceStep};
use dwsafe::Vec2;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> impl Strategy<Value = WorldParams> {
    (0.1..5.0f64, 0.1..5.0f64, 0.01..0.5f64, 0.0..3.0f64).prop_map(|(a, b, eps, v)| WorldParams {
        a_max: a,
        b,
        eps,
        v_obs: v,
        ..WorldParams::default()
    })
}

proptest! {
    #[test]
    fn max_velocity_inverts_safe_distance(p in params(), v in 0.0..10.0f64) {
        for mode in [SafetyMode::Static, SafetyMode::Passive] {
            let d = safe_distance(&SafetyQuery::new(mode, Refinements::empty(), p, v)).unwrap();
            let back = max_velocity(mode, d, &p);
            prop_assert!((back - v).abs() < 1e-6 * (1.0 + v), "{mode}: {v} -> {d} -> {back}");
        }
    }

    #[test]
    fn passive_needs_more_room(p in params(), v in 0.0..10.0f64) {
        let s = safe_distance(&SafetyQuery::new(SafetyMode::Static, Refinements::empty(), p, v)).unwrap();
        let q = safe_distance(&SafetyQuery::new(SafetyMode::Passive, Refinements::empty(), p, v)).unwrap();
        let f = safe_distance(&SafetyQuery::new(SafetyMode::PassiveFriendly, Refinements::empty(), p, v)).unwrap();
        prop_assert!(s <= q && q <= f);
    }

    #[test]
    fn flow_stays_on_the_circle(v in 0.0..10.0f64, a in -10.0..10.0f64, r in 0.1..100.0f64, dt in 0.0..1.0f64, th in 0.0..std::f64::consts::TAU) {
        let pre = RobotState::moving(Vec2::new(1.0, -2.0), Vec2::from_angle(th), v, r);
        let post = flow_robot(&pre, a, dt).unwrap().post;
        prop_assert!(((post.p_r - post.p_c).norm_2() - r).abs() < 1e-9 * r.max(1.0));
        prop_assert!((post.d_r.norm_2() - 1.0).abs() < 1e-12);
        prop_assert!(post.v_r >= 0.0);
        prop_assert!((post.p_r - pre.p_r).norm_2() <= v * dt + a.max(0.0) * dt * dt / 2.0 + 1e-9);
    }

    #[test]
    fn location_observation_stays_in_ball(dp in 0.0..2.0f64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = WorldParams { delta_p: dp, ..WorldParams::default() };
        let r = RobotState::moving(Vec2::new(3.0, 4.0), Vec2::new(0.0, 1.0), 1.0, 5.0);
        let o = observe(&r, &[], Refinements::of(&[Refinement::LocationUncertainty]), &p, &mut rng);
        prop_assert!((o.robot.p_r - r.p_r).norm_2() <= dp + 1e-15);
    }

    #[test]
    fn trace_csv_round_trip(xs in proptest::collection::vec(-1e6..1e6f64, 8), v in 0.0..100.0f64) {
        let sample = |k: usize| Sample {
            t_model: k as f64 * 0.05,
            robot: RobotState::moving(Vec2::new(xs[0], xs[1]), Vec2::from_angle(xs[2]), v, xs[3].abs().max(0.1)),
            obstacles: vec![ObstacleState::new(Vec2::new(xs[4], xs[5]), Vec2::new(xs[6] / 1e6, xs[7] / 1e6), 1.0)],
        };
        let tr = Trace { steps: (0..3).map(|k| TraceStep { step: k, pre: sample(k), post: sample(k), choice: None }).collect() };
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let back = Trace::read_csv(buf.as_slice(), &WorldParams::default()).unwrap();
        prop_assert_eq!(back, tr);
    }
}

#[test]
fn monitor_is_pure() {
    let s = sample_scenario(SafetyMode::Passive, Refinements::empty(), ObstaclePolicyKind::Random, 11);
    let tr = run(&s).unwrap().trace;
    for st in tr.steps.iter().take(50) {
        let a = eval_monitor(&st.pre, &st.post, &s.params, MonitorMode::Relaxed);
        let b = eval_monitor(&st.pre, &st.post, &s.params, MonitorMode::Relaxed);
        assert_eq!(a, b);
        assert!(a.pass);
    }
}

#[test]
fn nonsync_obstacles_reversing_mid_interval() {
    for seed in 0..40 {
        let s = sample_scenario(
            SafetyMode::Passive,
            Refinements::of(&[Refinement::NonSync]),
            ObstaclePolicyKind::Random,
            seed,
        );
        let ep = run(&Scenario { nonsync_cap: 8, ..s }).unwrap();
        assert!(ep.safe(), "seed {seed}: {:?}", ep.violations);
        assert!(ep.invariant_failures.is_empty());
    }
}

#[test]
fn deterministic_and_sampled_durations_are_both_safe() {
    for seed in 0..30 {
        for det in [true, false] {
            let mut s = sample_scenario(SafetyMode::Passive, Refinements::empty(), ObstaclePolicyKind::HeadOn, seed);
            s.deterministic = det;
            let ep = run(&s).unwrap();
            assert!(ep.safe());
            if det {
                assert_eq!(ep.steps, (s.horizon / s.params.eps - 1e-9).ceil() as usize);
            }
        }
    }
}

#[test]
fn weaker_margins_fail_more_often() {
    let mut template = Scenario::new(SafetyMode::Passive, WorldParams::default());
    template.policy = ObstaclePolicyKind::HeadOn;
    template.horizon = 6.0;
    template.obstacles = vec![ObstacleState::new(Vec2::new(5.0, 0.0), Vec2::ZERO, 1.0)];
    let counts: Vec<usize> = [0.2, 0.6, 1.0]
        .iter()
        .map(|&k| {
            let cfg = FalsifyConfig { stop_at_first: false, ..FalsifyConfig::new(300, 9) };
            falsify(&Scenario { kappa: k, ..template.clone() }, cfg).unwrap().violating_trials
        })
        .collect();
    assert!(counts[0] >= counts[1] && counts[1] >= counts[2], "{counts:?}");
    assert!(counts[0] > 0);
    assert_eq!(counts[2], 0);
}
