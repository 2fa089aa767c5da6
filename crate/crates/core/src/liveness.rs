//! Liveness controllers on straight roads: reaching a waypoint and crossing
//! an intersection, each with an untimed and a deadline variant, plus
//! runners that execute them against sampled durations and obstacles.

use crate::dynamics::speed_profile;
use crate::geom::{norm_inf, Vec2};
use crate::safety::{accel_compensation, safe_distance, stopping_distance, SafetyQuery};
use crate::scenario::{waypoint_params_ok, IntersectionGoal, WaypointGoal};
use crate::state::{Branch, ControlChoice, Refinements, SafetyMode, WorldParams, STRAIGHT_RADIUS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Position and speed on a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineState {
    pub p: f64,
    pub v: f64,
}

impl LineState {
    pub fn flow(self, a: f64, dt: f64) -> LineState {
        let (elapsed, stopped, s) = speed_profile(self.v, a, dt);
        let v = if stopped.is_some() { 0.0 } else { (self.v + a * elapsed).max(0.0) };
        LineState { p: self.p + s, v }
    }
}

/// Robot on the road `y = p_x.y` and obstacle on the road `x = p_x.x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingState {
    pub robot: LineState,
    pub obstacle: LineState,
}

fn choice(branch: Branch, a: f64, v: f64, p: f64) -> ControlChoice {
    ControlChoice {
        branch,
        a_r: a,
        omega_r: v / STRAIGHT_RADIUS,
        r_c: STRAIGHT_RADIUS,
        p_c: Vec2::new(p, STRAIGHT_RADIUS),
        d_flip: false,
        visible: Vec::new(),
    }
}

fn brake_or_stay(s: LineState, params: &WorldParams) -> ControlChoice {
    if s.v == 0.0 {
        choice(Branch::Stay, 0.0, 0.0, s.p)
    } else {
        choice(Branch::Brake, -params.b, s.v, s.p)
    }
}

/// `p_r + v²/2b + (A/b+1)(A/2 ε² + ε v)`: furthest stop point after one
/// cycle of acceleration.
fn reach(s: LineState, params: &WorldParams) -> f64 {
    s.p + stopping_distance(s.v, params.b) + accel_compensation(s.v, params.a_max, params.b, params.eps)
}

/// Whether acceleration `a` is admitted by one of the waypoint model's
/// non-braking branches.
pub fn waypoint_admissible(s: LineState, a: f64, goal: &WaypointGoal, params: &WorldParams) -> bool {
    let (b, a_max) = (params.b, params.a_max);
    if a < -b || a > a_max {
        return false;
    }
    let acc = reach(s, params) < goal.p_g + params.delta_goal;
    let approach = s.p < goal.p_g - params.delta_goal
        && s.v <= params.v_goal
        && a <= ((params.v_goal - s.v) / params.eps).min(a_max);
    acc || approach
}

/// Waypoint controller. Selects the branch that makes progress: full
/// acceleration while the goal region cannot be overshot at approach speed,
/// then tracking `V_g`, then braking inside the region. With a deadline the
/// choice is taken as is; otherwise it is checked against the untimed
/// model's guards and replaced by braking if inadmissible.
pub fn waypoint_decide(s: LineState, goal: &WaypointGoal, params: &WorldParams) -> ControlChoice {
    let (b, a_max, eps, vg) = (params.b, params.a_max, params.eps, params.v_goal);
    if s.p > goal.p_g - params.delta_goal {
        return brake_or_stay(s, params);
    }
    let full = s.p + (s.v * s.v - vg * vg) / (2.0 * b) + accel_compensation(s.v, a_max, b, eps)
        <= goal.p_g - params.delta_goal;
    let a = if full { a_max } else { ((vg - s.v) / eps).clamp(-b, a_max) };
    if goal.deadline.is_some() || waypoint_admissible(s, a, goal, params) {
        let branch = if a == -b && s.v > 0.0 { Branch::Brake } else { Branch::Accelerate };
        return choice(branch, a, s.v, s.p);
    }
    brake_or_stay(s, params)
}

/// Outcome of one waypoint run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaypointOutcome {
    pub entered: bool,
    pub stopped_inside: bool,
    pub overshoot: bool,
    /// For timed runs: every sample with `T ≤ 0` was stopped inside the region.
    pub deadline_met: Option<bool>,
    pub time: f64,
    pub final_state: LineState,
}

impl WaypointOutcome {
    pub fn success(&self) -> bool {
        self.entered && self.stopped_inside && !self.overshoot && self.deadline_met != Some(false)
    }
}

/// Drive from `start` until stopped inside the goal region (untimed) or
/// past the deadline. Durations are ε, or uniform in (0, ε] when `rng` is
/// given.
pub fn run_waypoint(
    start: LineState,
    goal: &WaypointGoal,
    params: &WorldParams,
    mut rng: Option<&mut ChaCha8Rng>,
    max_time: f64,
) -> WaypointOutcome {
    let lo = goal.p_g - params.delta_goal;
    let hi = goal.p_g + params.delta_goal;
    let mut s = start;
    let mut t = 0.0;
    let mut timer = goal.deadline;
    let mut out = WaypointOutcome {
        entered: false,
        stopped_inside: false,
        overshoot: false,
        deadline_met: goal.deadline.map(|_| true),
        time: 0.0,
        final_state: s,
    };
    loop {
        let inside = lo < s.p && s.p < hi;
        out.entered |= lo < s.p;
        out.overshoot |= s.p >= hi;
        out.stopped_inside = inside && s.v == 0.0;
        if let Some(tt) = timer {
            if tt <= 0.0 && !out.stopped_inside {
                out.deadline_met = Some(false);
            }
            if tt < -params.eps {
                break;
            }
        } else if out.stopped_inside {
            break;
        }
        if t > max_time {
            break;
        }
        let c = waypoint_decide(s, goal, params);
        let dt = match rng.as_deref_mut() {
            Some(r) => params.eps * (1.0 - r.random::<f64>()),
            None => params.eps,
        };
        s = s.flow(c.a_r, dt);
        t += dt;
        timer = timer.map(|x| x - dt);
    }
    out.time = t;
    out.final_state = s;
    out
}

/// Achievable-deadline condition for the waypoint task, together with the
/// task's initial condition.
pub fn waypoint_deadline_feasible(s: LineState, goal: &WaypointGoal, params: &WorldParams) -> bool {
    let Some(t) = goal.deadline else { return false };
    let vg = params.v_goal;
    let need = (vg - s.v) / params.a_max
        + (goal.p_g - params.delta_goal - s.p) / vg
        + vg / params.b
        + params.eps;
    t > need && s.v == 0.0 && s.p < goal.p_g - params.delta_goal && waypoint_params_ok(params)
}

/// Deadline condition for the intersection: `D ≥ ε` and full acceleration
/// for `D - ε` covers the remaining distance.
pub fn intersection_deadline_feasible(s: &CrossingState, goal: &IntersectionGoal, params: &WorldParams) -> bool {
    let Some(d) = goal.deadline else { return false };
    d >= params.eps && goal.p_x.x - s.robot.p < params.a_max / 2.0 * (d - params.eps).powi(2)
}

/// Initial timer value: negative until the obstacle can have reached the
/// intersection at minimum speed.
pub fn intersection_timer_start(s: &CrossingState, goal: &IntersectionGoal, params: &WorldParams) -> f64 {
    ((s.obstacle.p - goal.p_x.y) / params.v_min).min(0.0)
}

pub fn pass_front(s: &CrossingState, goal: &IntersectionGoal, params: &WorldParams) -> bool {
    let t = (goal.p_x.x - s.robot.p) / s.robot.v;
    s.obstacle.p + s.obstacle.v * t + params.a_max * t * t < goal.p_x.y
}

pub fn pass_behind(s: &CrossingState, goal: &IntersectionGoal, params: &WorldParams) -> bool {
    goal.p_x.y < s.obstacle.p + params.v_min * (goal.p_x.x - s.robot.p) / (s.robot.v + params.a_max * params.eps)
}

pub fn pass_const(s: &CrossingState, goal: &IntersectionGoal, params: &WorldParams) -> bool {
    s.robot.v > 0.0 && goal.p_x.y < s.obstacle.p + params.v_min * (goal.p_x.x - s.robot.p) / s.robot.v
}

/// Planar positions of robot and obstacle.
pub fn crossing_positions(s: &CrossingState, goal: &IntersectionGoal) -> (Vec2, Vec2) {
    (Vec2::new(s.robot.p, goal.p_x.y), Vec2::new(goal.p_x.x, s.obstacle.p))
}

/// Intersection controller. Guard precedence: past the intersection, then
/// (timed variant) obstacle already through, pass faster, pass at constant
/// speed, and otherwise the passive controller on the planar distance.
pub fn intersection_decide(s: &CrossingState, goal: &IntersectionGoal, params: &WorldParams) -> ControlChoice {
    let r = s.robot;
    let accel = |a: f64| choice(Branch::Accelerate, a, r.v, r.p);
    if r.p > goal.p_x.x {
        return accel(params.a_max);
    }
    if goal.deadline.is_some() && s.obstacle.p > goal.p_x.y {
        return accel(params.a_max);
    }
    if r.v > 0.0 && (pass_front(s, goal, params) || pass_behind(s, goal, params)) {
        return accel(params.a_max);
    }
    if pass_const(s, goal, params) {
        return accel(0.0);
    }
    let (pr, po) = crossing_positions(s, goal);
    let q = SafetyQuery::new(SafetyMode::Passive, Refinements::empty(), *params, r.v);
    match safe_distance(&q) {
        Ok(sd) if norm_inf(pr - po) > sd => accel(params.a_max),
        _ => brake_or_stay(r, params),
    }
}

/// Outcome of one intersection run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionOutcome {
    pub passed: bool,
    /// Timer value when the robot passed.
    pub pass_timer: Option<f64>,
    /// Contact while the robot was moving.
    pub collision_while_moving: bool,
    pub min_distance_moving: f64,
    /// Timed runs: the robot was past the intersection whenever `T ≥ D`.
    pub deadline_met: Option<bool>,
}

impl IntersectionOutcome {
    pub fn success(&self) -> bool {
        self.passed && !self.collision_while_moving && self.deadline_met != Some(false)
    }
}

/// Run the intersection task against an obstacle choosing accelerations in
/// `[-b, A]` uniformly at random, with speed kept in `[V_min, V]`.
pub fn run_intersection(
    start: CrossingState,
    goal: &IntersectionGoal,
    params: &WorldParams,
    seed: u64,
    max_time: f64,
) -> IntersectionOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = start;
    let mut timer = intersection_timer_start(&s, goal, params);
    let mut t = 0.0;
    let mut out = IntersectionOutcome {
        passed: false,
        pass_timer: None,
        collision_while_moving: false,
        min_distance_moving: f64::INFINITY,
        deadline_met: goal.deadline.map(|_| true),
    };
    let v_cap = params.v_obs.max(params.v_min);
    loop {
        if s.robot.p > goal.p_x.x && !out.passed {
            out.passed = true;
            out.pass_timer = Some(timer);
        }
        if let Some(d) = goal.deadline {
            if timer >= d && !out.passed {
                out.deadline_met = Some(false);
            }
            if timer >= d {
                break;
            }
        } else if out.passed {
            break;
        }
        if t > max_time {
            break;
        }
        let c = intersection_decide(&s, goal, params);
        let dt = params.eps * (1.0 - rng.random::<f64>());
        let mut a_o = rng.random_range(-params.b..=params.a_max);
        // Keep the obstacle speed inside [V_min, V] over the interval.
        a_o = a_o.clamp((params.v_min - s.obstacle.v) / dt, (v_cap - s.obstacle.v) / dt);
        let next = CrossingState {
            robot: s.robot.flow(c.a_r, dt),
            obstacle: LineState {
                p: s.obstacle.p + s.obstacle.v * dt + a_o * dt * dt / 2.0,
                v: s.obstacle.v + a_o * dt,
            },
        };
        let d = crossing_min_distance_moving(&s, c.a_r, a_o, dt, goal);
        out.min_distance_moving = out.min_distance_moving.min(d);
        if d <= crate::harness::CONTACT_TOL {
            out.collision_while_moving = true;
        }
        s = next;
        t += dt;
        timer += dt;
    }
    out
}

/// Minimum planar distance over the interval while the robot moves.
fn crossing_min_distance_moving(s: &CrossingState, a_r: f64, a_o: f64, dt: f64, goal: &IntersectionGoal) -> f64 {
    let moving = crate::harness::moving_until(s.robot.v, a_r, dt);
    if moving <= 0.0 {
        return f64::INFINITY;
    }
    let f = |tau: f64| {
        let r = s.robot.flow(a_r, tau).p;
        let o = s.obstacle.p + s.obstacle.v * tau + a_o * tau * tau / 2.0;
        (Vec2::new(r, goal.p_x.y) - Vec2::new(goal.p_x.x, o)).norm_2()
    };
    let lip = s.robot.v + a_r.max(0.0) * dt + s.obstacle.v.abs() + a_o.abs() * dt;
    crate::harness::min_on_interval(f, lip, moving)
}

/// Which liveness task to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LivenessKind {
    Waypoint,
    WaypointDeadline,
    Intersection,
    IntersectionDeadline,
}

impl LivenessKind {
    pub const ALL: [LivenessKind; 4] = [
        LivenessKind::Waypoint,
        LivenessKind::WaypointDeadline,
        LivenessKind::Intersection,
        LivenessKind::IntersectionDeadline,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LivenessKind::Waypoint => "waypoint",
            LivenessKind::WaypointDeadline => "waypoint-deadline",
            LivenessKind::Intersection => "intersection",
            LivenessKind::IntersectionDeadline => "intersection-deadline",
        }
    }
}

impl fmt::Display for LivenessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LivenessKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        LivenessKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown liveness kind `{s}`"))
    }
}

/// One grid point of a liveness experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LivenessCase {
    Waypoint { params: WorldParams, start: LineState, goal: WaypointGoal },
    Intersection { params: WorldParams, start: CrossingState, goal: IntersectionGoal, seed: u64 },
}

impl LivenessCase {
    /// Whether the case satisfies the task's feasibility condition.
    pub fn feasible(&self) -> bool {
        match self {
            LivenessCase::Waypoint { params, start, goal } => {
                let base = start.v == 0.0 && start.p < goal.p_g - params.delta_goal && waypoint_params_ok(params);
                match goal.deadline {
                    Some(_) => waypoint_deadline_feasible(*start, goal, params),
                    None => base,
                }
            }
            LivenessCase::Intersection { params, start, goal, .. } => {
                let (pr, po) = crossing_positions(start, goal);
                let q = SafetyQuery::new(SafetyMode::Passive, Refinements::empty(), *params, start.robot.v);
                let need = stopping_distance(start.robot.v, params.b) + params.v_obs * start.robot.v / params.b;
                let safe_start = start.robot.v == 0.0 || norm_inf(pr - po) > need;
                let obstacle_ok = start.obstacle.v >= params.v_min && start.obstacle.v <= params.v_obs;
                let deadline_ok = goal.deadline.is_none() || intersection_deadline_feasible(start, goal, params);
                safe_start && obstacle_ok && deadline_ok && safe_distance(&q).is_ok()
            }
        }
    }

    /// Run the case; true on success.
    pub fn run(&self) -> bool {
        match self {
            LivenessCase::Waypoint { params, start, goal } => {
                let horizon = 10.0 * (goal.p_g / params.v_goal + 10.0);
                run_waypoint(*start, goal, params, None, horizon).success()
            }
            LivenessCase::Intersection { params, start, goal, seed } => {
                run_intersection(*start, goal, params, *seed, 600.0).success()
            }
        }
    }
}

/// Summary of a liveness grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LivenessReport {
    pub kind: LivenessKind,
    pub total: usize,
    pub passed: usize,
    pub skipped_infeasible: usize,
    pub failed_cases: Vec<usize>,
}

impl fmt::Display for LivenessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}/{} passed, {} skipped-infeasible",
            self.kind, self.passed, self.total, self.skipped_infeasible
        )?;
        if !self.failed_cases.is_empty() {
            write!(f, ", failed cases {:?}", self.failed_cases)?;
        }
        Ok(())
    }
}

fn sample_params(rng: &mut ChaCha8Rng) -> WorldParams {
    WorldParams {
        a_max: rng.random_range(0.5..2.0),
        b: rng.random_range(0.5..2.0),
        eps: rng.random_range(0.02..0.1),
        v_obs: rng.random_range(0.5..2.0),
        v_min: rng.random_range(0.1..0.5),
        v_goal: rng.random_range(0.2..1.5),
        delta_goal: rng.random_range(0.2..1.0),
        ..WorldParams::default()
    }
}

/// Sample `n` cases of `kind`. Infeasible samples are kept so that callers
/// can report them; use [`liveness_grid`] for a feasible-only grid.
pub fn sample_liveness_cases(kind: LivenessKind, n: usize, seed: u64) -> Vec<LivenessCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let params = sample_params(&mut rng);
            match kind {
                LivenessKind::Waypoint | LivenessKind::WaypointDeadline => {
                    let start = LineState { p: 0.0, v: 0.0 };
                    let mut goal = WaypointGoal { p_g: rng.random_range(1.0..30.0), deadline: None };
                    if kind == LivenessKind::WaypointDeadline {
                        let vg = params.v_goal;
                        let need = vg / params.a_max + (goal.p_g - params.delta_goal) / vg + vg / params.b + params.eps;
                        goal.deadline = Some(need + rng.random_range(1e-3..1.0));
                    }
                    LivenessCase::Waypoint { params, start, goal }
                }
                LivenessKind::Intersection | LivenessKind::IntersectionDeadline => {
                    let p_x = Vec2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                    let start = CrossingState {
                        robot: LineState { p: p_x.x - rng.random_range(1.0..15.0), v: rng.random_range(0.0..1.0) },
                        obstacle: LineState {
                            p: p_x.y - rng.random_range(-2.0..15.0),
                            v: rng.random_range(params.v_min..params.v_obs.max(params.v_min)),
                        },
                    };
                    let mut goal = IntersectionGoal { p_x, deadline: None };
                    if kind == LivenessKind::IntersectionDeadline {
                        let dist = p_x.x - start.robot.p;
                        let d = params.eps + (2.0 * dist / params.a_max).sqrt();
                        goal.deadline = Some(d + rng.random_range(1e-3..0.5));
                    }
                    LivenessCase::Intersection { params, start, goal, seed: seed ^ (i as u64).wrapping_mul(0x9E37_79B9) }
                }
            }
        })
        .collect()
}

/// The first `n` feasible cases of `kind` drawn from the sampler.
pub fn liveness_grid(kind: LivenessKind, n: usize, seed: u64) -> Vec<LivenessCase> {
    let mut out = Vec::with_capacity(n);
    let mut round = 0u64;
    while out.len() < n {
        let batch = sample_liveness_cases(kind, n, seed.wrapping_add(round));
        out.extend(batch.into_iter().filter(LivenessCase::feasible).take(n - out.len()));
        round += 1;
    }
    out
}

/// Run every case, counting infeasible ones as skipped.
pub fn run_liveness_cases(kind: LivenessKind, cases: &[LivenessCase]) -> LivenessReport {
    use rayon::prelude::*;
    let results: Vec<Option<bool>> = crate::harness::with_pool(|| {
        cases
            .par_iter()
            .map(|c| c.feasible().then(|| c.run()))
            .collect()
    });
    let mut report = LivenessReport { kind, total: 0, passed: 0, skipped_infeasible: 0, failed_cases: Vec::new() };
    for (i, r) in results.into_iter().enumerate() {
        match r {
            None => report.skipped_infeasible += 1,
            Some(ok) => {
                report.total += 1;
                if ok {
                    report.passed += 1;
                } else {
                    report.failed_cases.push(i);
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp_params() -> WorldParams {
        WorldParams { a_max: 1.0, b: 1.0, eps: 0.05, v_goal: 1.0, delta_goal: 0.5, ..WorldParams::default() }
    }

    #[test]
    fn waypoint_far_from_rest_accelerates_fully() {
        let g = WaypointGoal { p_g: 10.0, deadline: None };
        let c = waypoint_decide(LineState { p: 0.0, v: 0.0 }, &g, &wp_params());
        assert_eq!(c.branch, Branch::Accelerate);
        assert_eq!(c.a_r, 1.0);
    }

    #[test]
    fn waypoint_inside_region() {
        let g = WaypointGoal { p_g: 10.0, deadline: None };
        let p = wp_params();
        assert_eq!(waypoint_decide(LineState { p: 10.2, v: 0.3 }, &g, &p).branch, Branch::Brake);
        let c = waypoint_decide(LineState { p: 10.2, v: 0.0 }, &g, &p);
        assert_eq!(c.branch, Branch::Stay);
        assert_eq!(c.a_r, 0.0);
    }

    #[test]
    fn waypoint_approach_tracks_goal_speed() {
        let g = WaypointGoal { p_g: 10.0, deadline: None };
        let p = wp_params();
        // Close to the region: not allowed to go full, track V_g.
        let c = waypoint_decide(LineState { p: 9.45, v: 0.98 }, &g, &p);
        assert!((c.a_r - 0.4).abs() < 1e-12, "{}", c.a_r);
        assert!(waypoint_admissible(LineState { p: 9.45, v: 0.98 }, c.a_r, &g, &p));
    }

    #[test]
    fn waypoint_deadline_examples() {
        let p = wp_params();
        let s = LineState { p: 0.0, v: 0.0 };
        // distance to region 10: 1 + 10 + 1 + 0.05 = 12.05
        let g = |t| WaypointGoal { p_g: 10.5, deadline: Some(t) };
        assert!(waypoint_deadline_feasible(s, &g(13.0), &p));
        assert!(!waypoint_deadline_feasible(s, &g(12.0), &p));
        assert!(!waypoint_deadline_feasible(s, &g(12.05), &p));
    }

    #[test]
    fn waypoint_runs_reach_and_stop() {
        let p = wp_params();
        let g = WaypointGoal { p_g: 10.0, deadline: None };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let o = run_waypoint(LineState { p: 0.0, v: 0.0 }, &g, &p, Some(&mut rng), 1e3);
        assert!(o.success(), "{o:?}");
        let o = run_waypoint(LineState { p: 0.0, v: 0.0 }, &g, &p, None, 1e3);
        assert!(o.success(), "{o:?}");
        let gd = WaypointGoal { p_g: 10.0, deadline: Some(12.6) };
        let o = run_waypoint(LineState { p: 0.0, v: 0.0 }, &gd, &p, None, 1e3);
        assert!(o.success(), "{o:?}");
    }

    fn cross(v_min: f64) -> (CrossingState, IntersectionGoal, WorldParams) {
        let p = WorldParams { a_max: 1.0, eps: 0.05, v_min, ..WorldParams::default() };
        let s = CrossingState { robot: LineState { p: 0.0, v: 2.0 }, obstacle: LineState { p: 0.0, v: v_min } };
        (s, IntersectionGoal { p_x: Vec2::new(10.0, 10.0), deadline: None }, p)
    }

    #[test]
    fn intersection_guard_examples() {
        let (s, g, p) = cross(3.0);
        assert!(pass_behind(&s, &g, &p));
        assert_eq!(intersection_decide(&s, &g, &p).a_r, 1.0);

        let (s, g, p) = cross(1.0);
        assert!(!pass_behind(&s, &g, &p));
        assert!(!pass_front(&s, &g, &p));
        assert!(!pass_const(&s, &g, &p));
        // passive fallback: planar distance 10 > 2 + 2 + (2)(0.00125 + 0.15) = 4.3025
        assert_eq!(intersection_decide(&s, &g, &p).a_r, 1.0);
        let mut near = s;
        near.robot.p = 8.0;
        near.obstacle.p = 8.0;
        assert_eq!(intersection_decide(&near, &g, &p).branch, Branch::Brake);
    }

    #[test]
    fn intersection_after_and_deadline() {
        let (mut s, mut g, p) = cross(1.0);
        s.robot.p = 10.5;
        assert_eq!(intersection_decide(&s, &g, &p).a_r, 1.0);
        g.deadline = Some(p.eps);
        s.robot.p = 0.0;
        assert!(!intersection_deadline_feasible(&s, &g, &p));
        g.deadline = Some(5.0);
        assert!(intersection_deadline_feasible(&s, &g, &p));
        assert_eq!(intersection_timer_start(&s, &g, &p), -10.0);
    }

    #[test]
    fn small_grids_pass() {
        for kind in LivenessKind::ALL {
            let cases = liveness_grid(kind, 10, 11);
            let r = run_liveness_cases(kind, &cases);
            assert_eq!(r.passed, 10, "{r}");
        }
    }

    #[test]
    fn infeasible_points_are_skipped() {
        let mut p = wp_params();
        p.v_goal = 2.0;
        let case = LivenessCase::Waypoint { params: p, start: LineState { p: 0.0, v: 0.0 }, goal: WaypointGoal { p_g: 10.0, deadline: None } };
        let r = run_liveness_cases(LivenessKind::Waypoint, &[case]);
        assert_eq!((r.total, r.skipped_infeasible), (0, 1));
    }
}
