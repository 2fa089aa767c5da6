//! Episode execution: observation and actuation noise, obstacle policies,
//! closed-form flow, contact detection, and per-step property checks.
//!
//! Each control cycle the robot decides first, then obstacles choose their
//! velocities knowing the robot's plan and the interval length, then both
//! flow. Obstacles thereby get the strongest information available.

use crate::controllers::{Controller, Observation};
use crate::dynamics::{
    check_differential_invariants, flow_obstacle, flow_refined_obstacle, flow_robot, robot_position_at,
};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::monitor::{eval_monitor, MonitorMode};
use crate::safety::{eta_obs, invariant_slack, obstacle_bound};
use crate::scenario::{validate_scenario, Goal, Scenario};
use crate::state::{
    Branch, ControlChoice, ObstaclePolicyKind, ObstacleState, Refinement, Refinements, RobotState, SafetyMode,
    WorldParams, STRAIGHT_RADIUS,
};
use crate::trace::{Sample, Trace, TraceStep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Distance at or below which robot and obstacle are in contact (m).
pub const CONTACT_TOL: f64 = 1e-6;
/// Distances below this are counted as near misses (m).
pub const NEAR_MISS: f64 = 1e-3;
/// Speed at or above which the robot counts as moving (m/s).
pub const MOVING_SPEED: f64 = 1e-3;
/// Rounding allowance on the loop-invariant slack.
pub const INVARIANT_TOL: f64 = 1e-9;

/// Run `f` on a pool capped by `DWSAFE_THREADS`, or on the global pool.
pub fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var("DWSAFE_THREADS").ok().and_then(|s| s.parse::<usize>().ok());
    match cap {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Sub-interval of `[0, dt]` in which the speed `v + a t` is at least
/// [`MOVING_SPEED`].
pub fn moving_window(v: f64, a: f64, dt: f64) -> Option<(f64, f64)> {
    if a >= 0.0 {
        if v >= MOVING_SPEED {
            Some((0.0, dt))
        } else if a > 0.0 && (MOVING_SPEED - v) / a < dt {
            Some(((MOVING_SPEED - v) / a, dt))
        } else {
            None
        }
    } else if v >= MOVING_SPEED {
        Some((0.0, ((v - MOVING_SPEED) / -a).min(dt)))
    } else {
        None
    }
}

/// Length of the moving window starting at 0, for motions that only slow down.
pub(crate) fn moving_until(v: f64, a: f64, dt: f64) -> f64 {
    match moving_window(v, a, dt) {
        Some((0.0, t1)) => t1,
        Some((t0, t1)) => t1 - t0,
        None => 0.0,
    }
}

/// Minimum of a function with Lipschitz constant `lip` on `[0, t1]`.
pub(crate) fn min_on_interval(f: impl Fn(f64) -> f64, lip: f64, t1: f64) -> f64 {
    min_on_range(&f, lip, 0.0, t1).0
}

/// Branch and bound on `[t0, t1]`; returns the minimum (to a relative
/// accuracy of 1e-3, absolute 1e-9) and its location.
pub(crate) fn min_on_range(f: &dyn Fn(f64) -> f64, lip: f64, t0: f64, t1: f64) -> (f64, f64) {
    let (f0, f1) = (f(t0), f(t1));
    let (mut best, mut at) = if f0 <= f1 { (f0, t0) } else { (f1, t1) };
    let mut stack = vec![(t0, t1, f0, f1)];
    let mut evals = 0usize;
    while let Some((a, b, fa, fb)) = stack.pop() {
        let lower = (fa + fb - lip * (b - a)) / 2.0;
        let tol = (1e-3 * best).max(1e-9);
        if lower >= best - tol || b - a < 1e-15 || evals > 100_000 {
            continue;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        evals += 1;
        if fm < best {
            best = fm;
            at = m;
        }
        stack.push((a, m, fa, fm));
        stack.push((m, b, fm, fb));
    }
    (best, at)
}

/// Robot observation with location and velocity noise applied.
pub fn observe(
    robot: &RobotState,
    obstacles: &[ObstacleState],
    refinements: Refinements,
    params: &WorldParams,
    rng: &mut impl Rng,
) -> Observation {
    let mut seen = *robot;
    if refinements.contains(Refinement::LocationUncertainty) && params.delta_p > 0.0 {
        let r = params.delta_p * rng.random::<f64>().sqrt();
        let th = rng.random_range(0.0..2.0 * PI);
        let off = Vec2::from_angle(th) * r;
        // clip into the ball against rounding
        let off = if off.norm_2() > params.delta_p { off * (params.delta_p / off.norm_2()) } else { off };
        seen.p_r = robot.p_r + off;
        seen.p_c = RobotState::implied_center(seen.p_r, seen.d_r, seen.r_c);
    }
    if refinements.contains(Refinement::VelocityUncertainty) && params.delta_v > 0.0 {
        let lo = (robot.v_r - params.delta_v).max(0.0);
        seen.v_r = rng.random_range(lo..=robot.v_r + params.delta_v);
        seen.omega_r = seen.v_r / seen.r_c;
    }
    Observation { robot: seen, stopped: robot.v_r == 0.0, obstacles: obstacles.to_vec() }
}

/// Effective acceleration: scaled by a factor in `[Δa, 1]` under actuator
/// perturbation, exact otherwise.
pub fn actuate(choice: &ControlChoice, refinements: Refinements, params: &WorldParams, rng: &mut impl Rng) -> f64 {
    if refinements.contains(Refinement::ActuatorPerturbation) && params.delta_a < 1.0 {
        choice.a_r * rng.random_range(params.delta_a..=1.0)
    } else {
        choice.a_r
    }
}

/// What an obstacle knows when it decides.
struct PolicyContext<'a> {
    robot: &'a RobotState,
    accel: f64,
    now: f64,
    dt: f64,
    params: &'a WorldParams,
}

impl PolicyContext<'_> {
    fn robot_at(&self, tau: f64) -> Vec2 {
        robot_position_at(self.robot, self.accel, tau)
    }
}

fn towards(from: Vec2, to: Vec2, speed: f64) -> Vec2 {
    match (to - from).normalized() {
        Some(d) => d * speed,
        None => Vec2::ZERO,
    }
}

fn cap(v: Vec2, limit: f64) -> Vec2 {
    let n = v.norm_2();
    if n > limit {
        v * (limit / n)
    } else {
        v
    }
}

/// How far ahead along the robot's planned motion a head-on obstacle looks (s).
const INTERCEPT_LOOKAHEAD: f64 = 5.0;

/// Earliest `τ` after `now` at which an obstacle at `p` moving straight at
/// `speed` can be where the robot will be if it keeps its plan; the
/// velocity doing so.
fn intercept(p: Vec2, speed: f64, ctx: &PolicyContext) -> Option<Vec2> {
    let g = |tau: f64| (ctx.robot_at(tau) - p).norm_2() - speed * (tau - ctx.now);
    // Fine grid over the current interval, coarse beyond it.
    let inside = (ctx.dt - ctx.now).max(0.0);
    let grid = (1..=32)
        .map(|k| ctx.now + inside * k as f64 / 32.0)
        .chain((1..=64).map(|k| ctx.dt.max(ctx.now) + INTERCEPT_LOOKAHEAD * k as f64 / 64.0));
    let mut prev = ctx.now;
    for tau in grid {
        if g(tau) <= 0.0 {
            let (mut lo, mut hi) = (prev, tau);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if g(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some((ctx.robot_at(hi) - p) * (1.0 / (hi - ctx.now)));
        }
        prev = tau;
    }
    None
}

fn obstacle_decide(
    kind: ObstaclePolicyKind,
    o: &ObstacleState,
    bound: f64,
    ctx: &PolicyContext,
    rng: &mut ChaCha8Rng,
) -> ObstacleState {
    let vmax = bound.min(o.v_max);
    let here = ctx.robot_at(ctx.now);
    let remaining = ctx.dt - ctx.now;
    let mut next = *o;
    match kind {
        ObstaclePolicyKind::Random => {
            let th = rng.random_range(0.0..2.0 * PI);
            next.v_o = Vec2::from_angle(th) * rng.random_range(0.0..=vmax);
        }
        ObstaclePolicyKind::Pursuit => next.v_o = towards(o.p_o, here, vmax),
        ObstaclePolicyKind::HeadOn => {
            next.v_o = match intercept(o.p_o, vmax, ctx) {
                Some(v) => cap(v, vmax),
                None => towards(o.p_o, ctx.robot_at(ctx.dt), vmax),
            };
        }
        ObstaclePolicyKind::Blocker => {
            let end = ctx.robot_at(ctx.dt);
            let v_end = (ctx.robot.v_r + ctx.accel * ctx.dt).max(0.0);
            let heading = crate::dynamics::arc_pose(
                ctx.robot.p_r,
                ctx.robot.d_r,
                ctx.robot.r_c,
                (end - ctx.robot.p_r).norm_2(),
            )
            .1;
            let lead = (v_end * v_end / (2.0 * ctx.params.b)).max(0.5);
            let target = end + heading * lead;
            let dist = (target - o.p_o).norm_2();
            let speed = if remaining > 0.0 { vmax.min(dist / remaining) } else { 0.0 };
            next.v_o = towards(o.p_o, target, speed);
        }
        ObstaclePolicyKind::RefinedAccel => {
            let d = (here - o.p_o).normalized().unwrap_or(o.d_o);
            let s = o.v_o.norm_2().min(vmax);
            let horizon = ctx.params.eps_obstacle().max(remaining);
            next.d_o = d;
            next.v_o = d * s;
            next.a_o = ((vmax - s) / horizon).max(-ctx.params.b_o);
            next.v_max = vmax;
        }
    }
    next
}

fn advance(o: &ObstacleState, refined: bool, dt: f64) -> ObstacleState {
    if refined {
        flow_refined_obstacle(o, dt).unwrap_or_else(|_| flow_obstacle(&ObstacleState { a_o: 0.0, ..*o }, dt))
    } else {
        flow_obstacle(o, dt)
    }
}

/// Piecewise obstacle motion over one interval.
#[derive(Debug, Clone)]
struct ObstaclePath {
    /// `(start time, state at start)`, sorted.
    pieces: Vec<(f64, ObstacleState)>,
    refined: bool,
}

impl ObstaclePath {
    fn at(&self, tau: f64) -> Vec2 {
        let k = self.pieces.partition_point(|(t, _)| *t <= tau).max(1) - 1;
        let (t0, s) = &self.pieces[k];
        advance(s, self.refined, tau - t0).p_o
    }

    fn max_speed(&self) -> f64 {
        self.pieces
            .iter()
            .map(|(_, s)| if self.refined { s.v_max.max(s.v_o.norm_2()) } else { s.v_o.norm_2() })
            .fold(0.0, f64::max)
    }
}

/// Kinds of safety-property violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Contact with a stationary obstacle.
    Contact,
    /// Contact while the robot was moving.
    ContactWhileMoving,
    /// The robot stopped closer than the obstacle's stopping distance.
    EtaObs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub step: usize,
    pub time: f64,
    pub obstacle: usize,
    pub kind: ViolationKind,
    pub distance: f64,
}

/// Result of one episode.
#[derive(Debug, Clone, Default)]
pub struct Episode {
    pub trace: Trace,
    pub steps: usize,
    pub violations: Vec<Violation>,
    /// Minimum Euclidean distance over all instants the robot moved.
    pub min_distance_moving: f64,
    pub near_misses: usize,
    pub stops: usize,
    /// Cycle boundaries at which the loop invariant failed.
    pub invariant_failures: Vec<usize>,
    pub invariant_checks: usize,
    pub diff_failures: Vec<(usize, String)>,
    /// Steps whose pre/post pair failed the monitor (when enabled).
    pub monitor_failures: Vec<usize>,
    pub final_sample: Option<Sample>,
    pub goal_distance: Option<f64>,
}

impl Episode {
    pub fn safe(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Options for [`run_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub record: bool,
    pub monitor: Option<MonitorMode>,
    pub stop_at_violation: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { record: true, monitor: None, stop_at_violation: false }
    }
}

/// Run a scenario, recording its trace.
pub fn run(s: &Scenario) -> Result<Episode> {
    run_with(s, RunOptions::default())
}

fn goal_point(s: &Scenario) -> Option<Vec2> {
    match s.goal {
        Some(Goal::Point { p }) => Some(p),
        _ => None,
    }
}

pub fn run_with(s: &Scenario, opts: RunOptions) -> Result<Episode> {
    let bad = validate_scenario(s);
    if !bad.is_empty() {
        return Err(Error::InvalidScenario(bad));
    }
    if matches!(s.goal, Some(Goal::Waypoint(_)) | Some(Goal::Intersection(_))) {
        return Err(Error::InvalidScenario(vec![
            "waypoint and intersection goals run through the liveness runners".into(),
        ]));
    }
    let p = &s.params;
    let refs = s.refinements;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let ctl = Controller::new(s.mode, refs, *p).with_goal(goal_point(s)).with_margin(s.kappa);
    let refined = s.policy == ObstaclePolicyKind::RefinedAccel;
    let stationary = s.mode == SafetyMode::Static;

    let mut robot = s.robot;
    let mut obstacles = s.obstacles.clone();
    if refined {
        for o in &mut obstacles {
            if let Some(d) = o.v_o.normalized() {
                o.d_o = d;
            }
        }
    }
    let mut ep = Episode { min_distance_moving: f64::INFINITY, ..Episode::default() };
    let n_cycles = (s.horizon / p.eps - 1e-9).ceil().max(1.0) as usize;
    let mut t_model = 0.0;

    for step in 0..n_cycles {
        ep.invariant_checks += 1;
        if invariant_slack(s.mode, refs, &robot, &obstacles, p) <= -INVARIANT_TOL {
            ep.invariant_failures.push(step);
        }
        let pre = Sample { t_model, robot, obstacles: obstacles.clone() };

        // Robot control.
        let obs = observe(&robot, &obstacles, refs, p, &mut rng);
        let choice = ctl.decide(&obs);
        let mut plan = robot;
        if choice.d_flip {
            plan.d_r = -plan.d_r;
        }
        plan.a_r = choice.a_r;
        plan.r_c = choice.r_c;
        plan.omega_r = plan.v_r / plan.r_c;
        plan.p_c = RobotState::implied_center(plan.p_r, plan.d_r, plan.r_c);
        plan.t = 0.0;
        if choice.branch == Branch::Accelerate {
            plan.beta = 0.0;
            if !choice.visible.is_empty() {
                for (o, v) in obstacles.iter_mut().zip(&choice.visible) {
                    o.visible = if *v { 1.0 } else { -1.0 };
                }
            }
        }
        let dt = if s.deterministic { p.eps } else { p.eps * (1.0 - rng.random::<f64>()) };
        let accel = actuate(&choice, refs, p, &mut rng);

        // Obstacle control at the start and, when not synchronized, at
        // sampled instants inside the interval.
        let mut instants = vec![0.0];
        if s.has(Refinement::NonSync) && !stationary {
            let n = rng.random_range(0..=s.nonsync_cap);
            let mut extra: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..dt)).collect();
            extra.sort_by(f64::total_cmp);
            instants.extend(extra);
        }
        let mut paths = Vec::with_capacity(obstacles.len());
        for o in obstacles.iter() {
            let bound = if stationary { 0.0 } else { obstacle_bound(o, refs, p) };
            let mut pieces = Vec::with_capacity(instants.len());
            let mut cur = *o;
            let mut last = 0.0;
            for &tau in &instants {
                cur = advance(&cur, refined, tau - last);
                last = tau;
                cur = if stationary {
                    ObstacleState { v_o: Vec2::ZERO, a_o: 0.0, ..cur }
                } else {
                    let ctx = PolicyContext { robot: &plan, accel, now: tau, dt, params: p };
                    obstacle_decide(s.policy, &cur, bound, &ctx, &mut rng)
                };
                pieces.push((tau, cur));
            }
            paths.push(ObstaclePath { pieces, refined });
        }
        let post_obstacles: Vec<ObstacleState> = paths.iter().map(|pth| pth.pieces[0].1).collect();
        let post = Sample { t_model, robot: plan, obstacles: post_obstacles.clone() };

        if let Some(mode) = opts.monitor {
            if !eval_monitor(&pre, &post, p, mode).pass {
                ep.monitor_failures.push(step);
            }
        }

        // Flow.
        let flow = flow_robot(&plan, accel, dt)?;
        let end_obstacles: Vec<ObstacleState> = paths
            .iter()
            .map(|pth| {
                let (t0, st) = pth.pieces.last().unwrap();
                advance(st, refined, dt - t0)
            })
            .collect();

        // Properties over the interval.
        check_interval(s, step, t_model, &plan, accel, dt, &flow, &paths, &obstacles, &mut ep);

        let bound = obstacles
            .iter()
            .map(|o| if stationary { 0.0 } else { obstacle_bound(o, refs, p).min(o.v_max) })
            .fold(0.0, f64::max);
        let mut start = plan;
        start.t = 0.0;
        let report = check_differential_invariants(&start, &flow.post, accel, bound, &post_obstacles, &end_obstacles, dt);
        if !report.ok() {
            ep.diff_failures.push((step, report.failures.join("; ")));
        }

        if opts.record {
            ep.trace.steps.push(TraceStep { step, pre, post, choice: Some(choice) });
        }
        robot = flow.post;
        robot.t = 0.0;
        // The obstacle visibility flag survives flows.
        obstacles = end_obstacles;
        t_model += dt;
        ep.steps = step + 1;
        if opts.stop_at_violation && !ep.violations.is_empty() {
            break;
        }
    }
    ep.goal_distance = goal_point(s).map(|g| (robot.p_r - g).norm_2());
    ep.final_sample = Some(Sample { t_model, robot, obstacles });
    Ok(ep)
}

#[allow(clippy::too_many_arguments)]
fn check_interval(
    s: &Scenario,
    step: usize,
    t_model: f64,
    plan: &RobotState,
    accel: f64,
    dt: f64,
    flow: &crate::dynamics::FlowResult,
    paths: &[ObstaclePath],
    obstacles: &[ObstacleState],
    ep: &mut Episode,
) {
    let p = &s.params;
    let robot_speed_max = plan.v_r.max(plan.v_r + accel * dt).max(0.0);
    let window = moving_window(plan.v_r, accel, dt);
    for (i, path) in paths.iter().enumerate() {
        let lip = robot_speed_max + path.max_speed();
        let dist = |tau: f64| (robot_position_at(plan, accel, tau) - path.at(tau)).norm_2();
        // Split at obstacle decision instants so each piece is smooth.
        let mut bounds: Vec<f64> = path.pieces.iter().map(|(t, _)| *t).collect();
        bounds.push(dt);
        let min_over = |lo: f64, hi: f64| -> (f64, f64) {
            let mut best = (f64::INFINITY, lo);
            for w in bounds.windows(2) {
                let (a, b) = (w[0].max(lo), w[1].min(hi));
                if a <= b {
                    let m = min_on_range(&dist, lip, a, b);
                    if m.0 < best.0 {
                        best = m;
                    }
                }
            }
            best
        };
        if s.mode == SafetyMode::Static {
            let (d, at) = min_over(0.0, dt);
            if d <= CONTACT_TOL {
                ep.violations.push(Violation { step, time: t_model + at, obstacle: i, kind: ViolationKind::Contact, distance: d });
            }
        }
        if let Some((lo, hi)) = window {
            let (d, at) = min_over(lo, hi);
            ep.min_distance_moving = ep.min_distance_moving.min(d);
            if d <= CONTACT_TOL {
                let excused = s.mode == SafetyMode::PassiveOrientation && {
                    let beta_end = flow.post.beta.abs().max(plan.beta.abs());
                    obstacles[i].visible <= 0.0 && beta_end < p.gamma
                };
                if !excused && s.mode != SafetyMode::Static {
                    ep.violations.push(Violation {
                        step,
                        time: t_model + at,
                        obstacle: i,
                        kind: ViolationKind::ContactWhileMoving,
                        distance: d,
                    });
                }
            } else if d < NEAR_MISS {
                ep.near_misses += 1;
            }
        }
        if let Some(ts) = flow.stopped_at {
            if plan.v_r > 0.0 && s.mode == SafetyMode::PassiveFriendly {
                let d = (flow.post.p_r - path.at(ts)).norm_2();
                if !eta_obs(d, p) {
                    ep.violations.push(Violation { step, time: t_model + ts, obstacle: i, kind: ViolationKind::EtaObs, distance: d });
                }
            }
        }
    }
    if flow.stopped_at.is_some() && plan.v_r > 0.0 {
        ep.stops += 1;
    }
}

/// Run many scenarios in parallel, in input order.
pub fn run_batch(scenarios: &[Scenario], opts: RunOptions) -> Vec<Result<Episode>> {
    use rayon::prelude::*;
    with_pool(|| scenarios.par_iter().map(|s| run_with(s, opts)).collect())
}

/// Random scenario for property testing: parameters, obstacle placement
/// between the robot and a goal point, and refinement bounds are drawn from
/// `seed`.
pub fn sample_scenario(
    mode: SafetyMode,
    refinements: Refinements,
    policy: ObstaclePolicyKind,
    seed: u64,
) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5DEE_CE66_D1CE_5EED);
    let mut params = WorldParams {
        a_max: rng.random_range(0.5..2.0),
        b: rng.random_range(0.5..2.0),
        b_o: rng.random_range(0.5..2.0),
        eps: rng.random_range(0.05..=0.1),
        v_obs: rng.random_range(0.5..2.0),
        omega_max: rng.random_range(0.5..2.0),
        tau: rng.random_range(0.0..0.5),
        gamma: rng.random_range(PI / 3.0..1.5 * PI),
        ..WorldParams::default()
    };
    if refinements.contains(Refinement::LocationUncertainty) {
        params.delta_p = rng.random_range(0.0..0.3);
    }
    if refinements.contains(Refinement::ActuatorPerturbation) {
        params.delta_a = rng.random_range(0.5..=1.0);
    }
    if refinements.contains(Refinement::VelocityUncertainty) {
        params.delta_v = rng.random_range(0.0..0.3);
    }
    let mut s = Scenario::new(mode, params);
    s.refinements = refinements;
    s.policy = policy;
    s.seed = rng.random();
    s.deterministic = rng.random_bool(0.25);
    let heading = Vec2::from_angle(rng.random_range(0.0..2.0 * PI));
    let r_c = if rng.random_bool(0.5) { STRAIGHT_RADIUS } else { rng.random_range(1.0..10.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 } };
    s.robot = RobotState::at_rest(Vec2::ZERO, heading, r_c);
    let goal = heading.rotate(rng.random_range(-0.7..0.7)) * rng.random_range(10.0..25.0);
    s.goal = Some(Goal::Point { p: goal });
    let n = if refinements.contains(Refinement::MultiObstacle) { rng.random_range(2..=5) } else { 1 };
    let min_gap = if mode == SafetyMode::PassiveFriendly {
        params.v_obs * params.v_obs / (2.0 * params.b_o) + params.tau * params.v_obs + 0.1
    } else {
        0.5
    };
    for _ in 0..n {
        let p_o = loop {
            let along = goal * rng.random_range(0.1..0.9);
            let cand = along + Vec2::from_angle(rng.random_range(0.0..2.0 * PI)) * rng.random_range(0.0..3.0);
            if cand.norm_2() > min_gap {
                break cand;
            }
        };
        let v_max = if refinements.contains(Refinement::MultiObstacle) {
            rng.random_range(0.2..=params.v_obs * 1.5)
        } else {
            params.v_obs
        };
        s.obstacles.push(ObstacleState::new(p_o, Vec2::ZERO, v_max));
    }
    s
}
