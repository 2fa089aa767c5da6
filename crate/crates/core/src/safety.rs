//! Safe-distance formulas, the `safe` predicates of each controller, loop
//! invariants and the maximum-velocity computation.

use crate::error::{Error, Result};
use crate::geom::{norm_inf, Vec2};
use crate::state::{
    ObstacleState, Refinement, Refinements, RobotState, SafetyMode, WorldParams, LINK_TOL,
};

/// Inputs of one `safe` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyQuery {
    pub mode: SafetyMode,
    pub refinements: Refinements,
    /// True speed (used unless velocity uncertainty is on).
    pub v_r: f64,
    /// Chosen acceleration; required under `ActualAccel`.
    pub a_r: Option<f64>,
    /// Measured speed; used under `VelocityUncertainty`.
    pub v_hat: Option<f64>,
    /// Speed bound of the obstacle being checked: V, or V(i) for many obstacles.
    pub v_obstacle: f64,
    /// Scale applied to thresholds in [`is_safe_curve`]. 1 is the verified controller.
    pub margin: f64,
    pub params: WorldParams,
}

impl SafetyQuery {
    pub fn new(mode: SafetyMode, refinements: Refinements, params: WorldParams, v_r: f64) -> Self {
        SafetyQuery {
            mode,
            refinements,
            v_r,
            a_r: None,
            v_hat: None,
            v_obstacle: params.v_obs,
            margin: 1.0,
            params,
        }
    }

    pub fn with_accel(mut self, a_r: f64) -> Self {
        self.a_r = Some(a_r);
        self
    }

    pub fn with_measured_speed(mut self, v_hat: f64) -> Self {
        self.v_hat = Some(v_hat);
        self
    }

    pub fn with_obstacle_bound(mut self, v: f64) -> Self {
        self.v_obstacle = v;
        self
    }

    pub fn with_margin(mut self, kappa: f64) -> Self {
        self.margin = kappa;
        self
    }

    fn has(&self, r: Refinement) -> bool {
        self.refinements.contains(r)
    }

    /// Speed the formulas are evaluated at.
    pub fn speed(&self) -> f64 {
        if self.has(Refinement::VelocityUncertainty) {
            self.v_hat.unwrap_or(self.v_r) + self.params.delta_v
        } else {
            self.v_r
        }
    }

    /// Braking deceleration guaranteed despite actuator perturbation.
    pub fn braking(&self) -> f64 {
        if self.has(Refinement::ActuatorPerturbation) {
            self.params.b * self.params.delta_a
        } else {
            self.params.b
        }
    }

    /// Acceleration assumed during the next cycle.
    fn accel(&self) -> Result<f64> {
        if !self.has(Refinement::ActualAccel) {
            return Ok(self.params.a_max);
        }
        let a = self
            .a_r
            .ok_or_else(|| Error::Safety("actual acceleration requires a_r".into()))?;
        if a < -self.params.b - LINK_TOL || a > self.params.a_max + LINK_TOL {
            return Err(Error::Safety(format!("a_r = {a} outside [-b, A]")));
        }
        // The weakest possible braking is the worst case under perturbation.
        if a < 0.0 && self.has(Refinement::ActuatorPerturbation) {
            Ok(a * self.params.delta_a)
        } else {
            Ok(a)
        }
    }

    fn obstacle_speed(&self) -> f64 {
        match self.mode {
            SafetyMode::Static => 0.0,
            _ => self.v_obstacle,
        }
    }
}

/// Distance needed to stop from `v` braking at `b`.
pub fn stopping_distance(v: f64, b: f64) -> f64 {
    v * v / (2.0 * b)
}

/// Extra distance from accelerating at `acc` for up to `eps` before braking.
pub fn accel_compensation(v: f64, acc: f64, b: f64, eps: f64) -> f64 {
    (acc / b + 1.0) * (acc / 2.0 * eps * eps + eps * v)
}

/// The strict lower bound on `norm_inf(p_r - p_o)` that permits accelerating.
pub fn safe_distance(q: &SafetyQuery) -> Result<f64> {
    let p = &q.params;
    let bad = p.violations();
    if !bad.is_empty() {
        return Err(Error::Safety(bad.join("; ")));
    }
    if !(q.v_r >= 0.0) {
        return Err(Error::Safety(format!("v_r = {} < 0", q.v_r)));
    }
    let v = q.speed();
    let b = q.braking();
    let acc = q.accel()?;
    let vo = q.obstacle_speed();
    let eps = p.eps;

    let mut d = if q.has(Refinement::ActualAccel) && v + acc * eps < 0.0 {
        if acc == 0.0 {
            return Err(Error::Safety("a_r = 0 cannot stop within the cycle".into()));
        }
        -v * v / (2.0 * acc) - vo * v / acc
    } else {
        stopping_distance(v, b) + vo * v / b + accel_compensation(v + vo, acc, b, eps)
    };
    if q.mode == SafetyMode::PassiveFriendly {
        d += vo * vo / (2.0 * p.b_o) + p.tau * vo;
    }
    if q.has(Refinement::LocationUncertainty) {
        d += p.delta_p;
    }
    Ok(d)
}

/// Distance an obstacle may cover until the robot has stopped, for the
/// circle-clearance disjunct.
pub fn trajectory_travel_bound(q: &SafetyQuery) -> Result<f64> {
    let v = q.speed();
    let b = q.braking();
    let acc = q.accel()?;
    let vo = q.obstacle_speed();
    let eps = q.params.eps;
    let t = if v + acc * eps >= 0.0 {
        eps + (v + acc * eps) / b
    } else {
        -v / acc
    };
    let mut d = vo * t;
    if q.has(Refinement::LocationUncertainty) {
        d += q.params.delta_p;
    }
    Ok(d)
}

/// `| |r_c| - |p_o - p_c| |`, the distance of `p_o` to the circle through
/// `p_r` with tangent `d_r` and radius `r_c`.
///
/// Expanded around `p_r` so that straight-line radii (1e6 m) do not cancel.
pub fn circle_clearance(p_o: Vec2, p_r: Vec2, d_r: Vec2, r_c: f64) -> f64 {
    let u = p_o - p_r;
    // p_r - p_c = -r_c d_r^⊥
    let w = d_r.perp() * -r_c;
    let num = u.dot(u) + 2.0 * u.dot(w) + r_c * r_c * (d_r.dot(d_r) - 1.0);
    num.abs() / ((u + w).norm_2() + r_c.abs())
}

/// True iff `p_o` lies in the sector of angular width `gamma` centered on `d_r`.
pub fn visibility(robot: &RobotState, p_o: Vec2, gamma: f64) -> bool {
    let rel = p_o - robot.p_r;
    if rel == Vec2::ZERO || gamma >= 2.0 * std::f64::consts::PI {
        return true;
    }
    let ang = robot.d_r.cross(rel).atan2(robot.d_r.dot(rel)).abs();
    ang <= gamma / 2.0 + 1e-12
}

/// Clear distance ahead: the robot can stop inside the visible part of its curve.
pub fn cda_ok(v_r: f64, r_c: f64, params: &WorldParams) -> bool {
    params.gamma * r_c.abs()
        > stopping_distance(v_r, params.b) + accel_compensation(v_r, params.a_max, params.b, params.eps)
}

/// The `safe` test of the controller for one obstacle and the candidate
/// curve stored in `robot` (`r_c`, `p_c`).
pub fn is_safe_curve(robot: &RobotState, obstacle: &ObstacleState, q: &SafetyQuery) -> bool {
    if q.mode == SafetyMode::PassiveOrientation {
        if !cda_ok(q.speed(), robot.r_c, &q.params) {
            return false;
        }
        if !visibility(robot, obstacle.p_o, q.params.gamma) {
            return true;
        }
    }
    let Ok(sd) = safe_distance(q) else {
        return false;
    };
    if norm_inf(robot.p_r - obstacle.p_o) > q.margin * sd {
        return true;
    }
    if q.has(Refinement::TrajectoryDistance) {
        if let Ok(bound) = trajectory_travel_bound(q) {
            return circle_clearance(obstacle.p_o, robot.p_r, robot.d_r, robot.r_c) > q.margin * bound;
        }
    }
    false
}

/// Per-obstacle speed bound in effect.
pub fn obstacle_bound(o: &ObstacleState, refinements: Refinements, params: &WorldParams) -> f64 {
    if refinements.contains(Refinement::MultiObstacle) {
        o.v_max
    } else {
        params.v_obs
    }
}

/// η_obs: an obstacle at Euclidean `distance` can still stop in time.
pub fn eta_obs(distance: f64, params: &WorldParams) -> bool {
    let v = params.v_obs;
    distance > v * v / (2.0 * params.b_o) + params.tau * v
}

/// Whether an obstacle can come to rest without touching the stopped robot.
pub fn passive_friendly_obstacle_can_stop(
    robot: &RobotState,
    obstacle: &ObstacleState,
    params: &WorldParams,
) -> Result<bool> {
    if robot.v_r != 0.0 {
        return Err(Error::Precondition(format!(
            "robot must be stopped (v_r = {})",
            robot.v_r
        )));
    }
    Ok(eta_obs((robot.p_r - obstacle.p_o).norm_2(), params))
}

/// The loop invariant of `mode` (with refinements) over all obstacles.
pub fn loop_invariant(
    mode: SafetyMode,
    refinements: Refinements,
    robot: &RobotState,
    obstacles: &[ObstacleState],
    params: &WorldParams,
) -> bool {
    invariant_slack(mode, refinements, robot, obstacles, params) > 0.0
}

/// Smallest slack of the loop invariant; positive iff it holds.
pub fn invariant_slack(
    mode: SafetyMode,
    refinements: Refinements,
    robot: &RobotState,
    obstacles: &[ObstacleState],
    params: &WorldParams,
) -> f64 {
    let v = robot.v_r;
    let b = if refinements.contains(Refinement::ActuatorPerturbation) {
        params.b * params.delta_a
    } else {
        params.b
    };
    let mut slack = f64::INFINITY;
    if mode == SafetyMode::PassiveOrientation && v != 0.0 {
        let arc = robot.beta.abs() * robot.r_c.abs();
        slack = slack.min(params.gamma * robot.r_c.abs() - arc - stopping_distance(v, b));
    }
    for o in obstacles {
        let dist = norm_inf(robot.p_r - o.p_o);
        let s = match mode {
            SafetyMode::Static => dist - stopping_distance(v, b),
            _ if v == 0.0 => continue,
            SafetyMode::PassiveOrientation if o.visible <= 0.0 => continue,
            _ => {
                let vo = obstacle_bound(o, refinements, params);
                let mut need = stopping_distance(v, b) + vo * v / b;
                if mode == SafetyMode::PassiveFriendly {
                    need += vo * vo / (2.0 * params.b_o) + params.tau * vo;
                }
                let s = dist - need;
                if refinements.contains(Refinement::TrajectoryDistance) && s <= 0.0 {
                    circle_clearance(o.p_o, robot.p_r, robot.d_r, robot.r_c) - vo * v / b
                } else {
                    s
                }
            }
        };
        slack = slack.min(s);
    }
    slack
}

/// Supremum of speeds whose safe distance is below `distance` (0 if none).
pub fn max_velocity(mode: SafetyMode, distance: f64, params: &WorldParams) -> f64 {
    let (a_max, b, eps) = (params.a_max, params.b, params.eps);
    let vo = if mode == SafetyMode::Static { 0.0 } else { params.v_obs };
    let k = a_max / b + 1.0;
    // (1/2b) v² + (V/b + kε) v + k(Aε²/2 + εV) [+ friendly] - d = 0
    let qa = 1.0 / (2.0 * b);
    let qb = vo / b + k * eps;
    let mut qc = k * (a_max * eps * eps / 2.0 + eps * vo) - distance;
    if mode == SafetyMode::PassiveFriendly {
        qc += vo * vo / (2.0 * params.b_o) + params.tau * vo;
    }
    if qc >= 0.0 {
        return 0.0;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    -2.0 * qc / (qb + disc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> WorldParams {
        WorldParams {
            a_max: 1.0,
            b: 1.0,
            v_obs: 1.0,
            eps: 0.05,
            ..WorldParams::default()
        }
    }

    fn q(mode: SafetyMode, v: f64) -> SafetyQuery {
        SafetyQuery::new(mode, Refinements::empty(), unit(), v)
    }

    // Independent transcription of the safe-distance sums, term by term.
    fn oracle(v: f64, a: f64, b: f64, vo: f64, eps: f64) -> f64 {
        let stop = v * v / (2.0 * b);
        let approach = vo * v / b;
        let react = (a / b + 1.0) * (a / 2.0 * eps * eps + eps * (v + vo));
        stop + approach + react
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(stopping_distance(1.0, 1.0), 0.5);
        assert_eq!(stopping_distance(0.0, 1.0), 0.0);
        assert_eq!(stopping_distance(2.0, 0.5), 4.0);
        assert!((accel_compensation(1.0, 1.0, 1.0, 0.05) - 0.1025).abs() < 1e-15);
        assert!((accel_compensation(2.0, 0.0, 3.0, 0.05) - 0.1).abs() < 1e-15);
        assert_eq!(accel_compensation(0.0, 0.0, 1.0, 0.05), 0.0);
    }

    #[test]
    fn safe_distance_examples() {
        let s = safe_distance(&q(SafetyMode::Static, 1.0)).unwrap();
        assert!((s - 0.6025).abs() < 1e-12);
        let mut p = unit();
        p.a_max = 0.0;
        let z = safe_distance(&SafetyQuery::new(SafetyMode::Static, Refinements::empty(), p, 0.0));
        assert_eq!(z.unwrap(), 0.0);
        let s = safe_distance(&q(SafetyMode::Passive, 1.0)).unwrap();
        assert!((s - 1.7025).abs() < 1e-12);
        // Braking within the cycle: v + a ε < 0 with ε = 2.
        let mut p = unit();
        p.eps = 2.0;
        let qa = SafetyQuery::new(
            SafetyMode::Passive,
            Refinements::of(&[Refinement::ActualAccel]),
            p,
            1.0,
        )
        .with_accel(-1.0);
        assert!((safe_distance(&qa).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn safe_distance_rejects_bad_inputs() {
        let mut p = unit();
        p.b = 0.0;
        assert!(safe_distance(&SafetyQuery::new(SafetyMode::Passive, Refinements::empty(), p, 1.0)).is_err());
        let qa = SafetyQuery::new(
            SafetyMode::Passive,
            Refinements::of(&[Refinement::ActualAccel]),
            unit(),
            1.0,
        );
        assert!(safe_distance(&qa).is_err(), "missing a_r");
        assert!(safe_distance(&qa.with_accel(5.0)).is_err(), "a_r above A");
    }

    #[test]
    fn friendly_adds_obstacle_stopping() {
        let mut p = unit();
        p.tau = 1.0;
        p.b_o = 2.0;
        let f = SafetyQuery::new(SafetyMode::PassiveFriendly, Refinements::empty(), p, 1.0);
        assert!((safe_distance(&f).unwrap() - (1.7025 + 0.25 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn is_safe_curve_examples() {
        let r = RobotState::moving(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 1e6);
        let far = ObstacleState::new(Vec2::new(10.0, 10.0), Vec2::ZERO, 1.0);
        let near = ObstacleState::new(Vec2::new(1.0, 0.0), Vec2::ZERO, 1.0);
        assert!(is_safe_curve(&r, &far, &q(SafetyMode::Passive, 1.0)));
        assert!(!is_safe_curve(&r, &near, &q(SafetyMode::Passive, 1.0)));

        // Circle of radius 2 around (2,0); obstacle at (2,5) is 3 m off the circle.
        let r = RobotState::moving(Vec2::ZERO, Vec2::new(0.0, -1.0), 1.0, 2.0);
        assert_eq!(r.p_c, Vec2::new(2.0, 0.0));
        let o = ObstacleState::new(Vec2::new(2.0, 5.0), Vec2::ZERO, 1.0);
        assert_eq!(circle_clearance(o.p_o, r.p_r, r.d_r, r.r_c), 3.0);
        let tq = SafetyQuery::new(
            SafetyMode::Passive,
            Refinements::of(&[Refinement::TrajectoryDistance]),
            unit(),
            1.0,
        );
        assert!((trajectory_travel_bound(&tq).unwrap() - 1.1).abs() < 1e-12);
        assert!(is_safe_curve(&r, &o, &tq));
    }

    #[test]
    fn trajectory_disjunct() {
        // Obstacle close in norm but far from the circle.
        let r = RobotState::moving(Vec2::ZERO, Vec2::new(0.0, -1.0), 1.0, 2.0);
        let o = ObstacleState::new(Vec2::new(1.0, 1.0), Vec2::ZERO, 1.0);
        let clearance = circle_clearance(o.p_o, r.p_r, r.d_r, r.r_c);
        assert!((clearance - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        let plain = q(SafetyMode::Passive, 1.0);
        assert!(!is_safe_curve(&r, &o, &plain));
        let mut p = unit();
        p.v_obs = 0.2;
        let tq = SafetyQuery::new(
            SafetyMode::Passive,
            Refinements::of(&[Refinement::TrajectoryDistance]),
            p,
            1.0,
        );
        // Travel bound 0.2 (0.05 + 1.05) = 0.22 < 0.586.
        assert!((trajectory_travel_bound(&tq).unwrap() - 0.22).abs() < 1e-12);
        assert!(is_safe_curve(&r, &o, &tq));
    }

    #[test]
    fn circle_clearance_is_stable_for_straight_lines() {
        let r = RobotState::moving(Vec2::new(3.0, -7.0), Vec2::new(1.0, 0.0), 1.0, 1e6);
        let o = Vec2::new(50.0, -7.0 + 0.25);
        let c = circle_clearance(o, r.p_r, r.d_r, r.r_c);
        // Exact: 1e6 - sqrt(47² + (1e6 - 0.25)²).
        let exact = 0.25 - 47.0 * 47.0 / (2.0 * 1e6);
        assert!((c - exact).abs() < 1e-8, "{c} vs {exact}");
    }

    #[test]
    fn visibility_examples() {
        let r = RobotState::at_rest(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0);
        assert!(visibility(&r, Vec2::new(5.0, 0.0), 0.1));
        assert!(!visibility(&r, Vec2::new(-5.0, 0.0), 1.9 * std::f64::consts::PI));
        assert!(visibility(&r, Vec2::new(1.0, 1.0), std::f64::consts::FRAC_PI_2));
        assert!(!visibility(&r, Vec2::new(1.0, 1.01), std::f64::consts::FRAC_PI_2));
        assert!(visibility(&r, Vec2::ZERO, 0.1));
    }

    #[test]
    fn cda_examples() {
        let mut p = unit();
        p.a_max = 0.0;
        p.gamma = 0.5;
        assert!(cda_ok(0.0, 1.0, &p));
        let mut p = unit();
        p.gamma = 1.0;
        assert!(cda_ok(1.0, 1.0, &p));
        assert!(!cda_ok(1.0, 0.5, &p));
    }

    #[test]
    fn loop_invariant_examples() {
        let p = unit();
        let o = |d: f64| vec![ObstacleState::new(Vec2::new(d, 0.0), Vec2::ZERO, 1.0)];
        let stopped = RobotState::at_rest(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0);
        assert!(loop_invariant(SafetyMode::Passive, Refinements::empty(), &stopped, &o(0.0), &p));
        let moving = RobotState::moving(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 1e6);
        assert!(!loop_invariant(SafetyMode::Passive, Refinements::empty(), &moving, &o(1.4), &p));
        assert!(loop_invariant(SafetyMode::Passive, Refinements::empty(), &moving, &o(1.6), &p));
        assert!(loop_invariant(SafetyMode::Static, Refinements::empty(), &moving, &o(0.6), &p));
        assert!(!loop_invariant(SafetyMode::Static, Refinements::empty(), &moving, &o(0.4), &p));
    }

    #[test]
    fn max_velocity_examples() {
        let mut p = unit();
        assert!((max_velocity(SafetyMode::Static, 1.25, &p) - 1.4827).abs() < 1e-4);
        assert!((max_velocity(SafetyMode::Static, 0.25, &p) - 0.6107).abs() < 1e-3);
        assert!((max_velocity(SafetyMode::Passive, 1.25, &p) - 0.7721).abs() < 1e-3);
        p.a_max = 2.0;
        p.b = 2.0;
        p.v_obs = 2.0;
        p.eps = 0.1;
        assert_eq!(max_velocity(SafetyMode::Passive, 0.25, &p), 0.0);
    }

    #[test]
    fn friendly_obstacle_can_stop_examples() {
        let mut p = unit();
        p.tau = 1.0;
        let r = RobotState::at_rest(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0);
        let at = |d: f64| ObstacleState::new(Vec2::new(d, 0.0), Vec2::ZERO, 1.0);
        assert!(passive_friendly_obstacle_can_stop(&r, &at(10.0), &p).unwrap());
        assert!(!passive_friendly_obstacle_can_stop(&r, &at(1.5), &p).unwrap());
        p.v_obs = 0.0;
        assert!(passive_friendly_obstacle_can_stop(&r, &at(1e-6), &p).unwrap());
        let moving = RobotState::moving(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 1.0);
        assert!(passive_friendly_obstacle_can_stop(&moving, &at(10.0), &p).is_err());
    }

    fn params_strategy() -> impl Strategy<Value = WorldParams> {
        (0.0f64..5.0, 0.1f64..5.0, 0.1f64..5.0, 0.0f64..3.0, 0.001f64..0.5, 0.0f64..2.0)
            .prop_map(|(a, b, b_o, v, eps, tau)| WorldParams {
                a_max: a,
                b,
                b_o,
                v_obs: v,
                eps,
                tau,
                ..WorldParams::default()
            })
    }

    proptest! {
        #[test]
        fn matches_oracle(p in params_strategy(), v in 0.0f64..10.0) {
            let s = safe_distance(&SafetyQuery::new(SafetyMode::Passive, Refinements::empty(), p, v)).unwrap();
            let o = oracle(v, p.a_max, p.b, p.v_obs, p.eps);
            prop_assert!((s - o).abs() <= 1e-12 * o.max(1.0));
            let st = safe_distance(&SafetyQuery::new(SafetyMode::Static, Refinements::empty(), p, v)).unwrap();
            let o = oracle(v, p.a_max, p.b, 0.0, p.eps);
            prop_assert!((st - o).abs() <= 1e-12 * o.max(1.0));
        }

        #[test]
        fn monotone_in_each_parameter(p in params_strategy(), v in 0.0f64..10.0, dv in 0.0f64..1.0) {
            let refs = Refinements::of(&[
                Refinement::LocationUncertainty,
                Refinement::ActuatorPerturbation,
                Refinement::VelocityUncertainty,
            ]);
            let mut p = p;
            p.delta_p = 0.1;
            p.delta_a = 0.8;
            p.delta_v = 0.1;
            let eval = |p: WorldParams, v: f64| {
                safe_distance(&SafetyQuery::new(SafetyMode::PassiveFriendly, refs, p, v).with_measured_speed(v)).unwrap()
            };
            let base = eval(p, v);
            let tol = 1e-12 * base.max(1.0);
            prop_assert!(eval(p, v + dv) >= base - tol);
            let up = |f: &dyn Fn(&mut WorldParams)| { let mut q = p; f(&mut q); eval(q, v) };
            prop_assert!(up(&|q| q.v_obs += dv) >= base - tol);
            prop_assert!(up(&|q| q.eps += dv * 0.1) >= base - tol);
            prop_assert!(up(&|q| q.a_max += dv) >= base - tol);
            prop_assert!(up(&|q| q.tau += dv) >= base - tol);
            prop_assert!(up(&|q| q.delta_p += dv) >= base - tol);
            prop_assert!(up(&|q| q.delta_v += dv) >= base - tol);
            prop_assert!(up(&|q| q.b += dv) <= base + tol);
            prop_assert!(up(&|q| q.b_o += dv) <= base + tol);
            prop_assert!(up(&|q| q.delta_a = (q.delta_a + dv * 0.2).min(1.0)) <= base + tol);
        }

        #[test]
        fn max_velocity_round_trip(p in params_strategy(), v in 0.01f64..10.0) {
            for mode in [SafetyMode::Static, SafetyMode::Passive, SafetyMode::PassiveFriendly] {
                let d = safe_distance(&SafetyQuery::new(mode, Refinements::empty(), p, v)).unwrap();
                let at = max_velocity(mode, d, &p);
                prop_assert!(at <= v * (1.0 + 1e-9), "{mode}: {at} > {v}");
                let above = max_velocity(mode, d + 1e-6 * d.max(1.0), &p);
                prop_assert!(above >= v, "{mode}: {above} < {v}");
            }
        }

        #[test]
        fn modes_are_ordered(p in params_strategy(), v in 0.0f64..10.0) {
            let s = |m| safe_distance(&SafetyQuery::new(m, Refinements::empty(), p, v)).unwrap();
            prop_assert!(s(SafetyMode::Static) <= s(SafetyMode::Passive));
            prop_assert!(s(SafetyMode::Passive) <= s(SafetyMode::PassiveFriendly));
        }

        #[test]
        fn refinements_reduce_to_passive(p in params_strategy(), v in 0.0f64..10.0) {
            let passive = safe_distance(&SafetyQuery::new(SafetyMode::Passive, Refinements::empty(), p, v)).unwrap();
            let actual = SafetyQuery::new(SafetyMode::Passive, Refinements::of(&[Refinement::ActualAccel]), p, v)
                .with_accel(p.a_max);
            prop_assert_eq!(safe_distance(&actual).unwrap(), passive);
            let mut z = p;
            z.delta_p = 0.0;
            z.delta_a = 1.0;
            z.delta_v = 0.0;
            for r in [Refinement::LocationUncertainty, Refinement::ActuatorPerturbation, Refinement::VelocityUncertainty] {
                let s = safe_distance(&SafetyQuery::new(SafetyMode::Passive, Refinements::of(&[r]), z, v).with_measured_speed(v)).unwrap();
                prop_assert_eq!(s, passive, "{}", r);
            }
        }
    }
}
