//! Closed-form motion of robot and obstacles over one control interval,
//! and the per-step differential-invariant checks.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::state::{ObstacleState, RobotState, LINK_TOL};

/// Robot state at the end of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowResult {
    pub post: RobotState,
    /// Time within the interval at which the robot came to rest.
    pub stopped_at: Option<f64>,
    /// Time the robot actually evolved (≤ requested duration).
    pub elapsed: f64,
}

/// Pose of a robot after driving arc length `s` on its current circle.
/// Returns `(position, heading, turned angle)`.
pub(crate) fn arc_pose(p: Vec2, d: Vec2, r_c: f64, s: f64) -> (Vec2, Vec2, f64) {
    let phi = s / r_c;
    // r_c sin φ and r_c (1 - cos φ), with series for small angles.
    let (along, across) = if phi.abs() < 1e-6 {
        let p2 = phi * phi;
        (s * (1.0 - p2 / 6.0), s * phi / 2.0 * (1.0 - p2 / 12.0))
    } else {
        let h = (phi / 2.0).sin();
        (r_c * phi.sin(), 2.0 * r_c * h * h)
    };
    let n = d.perp();
    let (sin, cos) = phi.sin_cos();
    let heading = d * cos + n * sin;
    let heading = heading * (1.0 / heading.norm_2());
    (p + d * along + n * across, heading, phi)
}

/// Stop time and travelled arc length after `dt` for speed `v`, acceleration `a`.
pub(crate) fn speed_profile(v: f64, a: f64, dt: f64) -> (f64, Option<f64>, f64) {
    if a < 0.0 {
        let tb = -v / a;
        if tb <= dt {
            return (tb, Some(tb), v * v / (-2.0 * a));
        }
    }
    (dt, None, v * dt + 0.5 * a * dt * dt)
}

/// Drive `pre` with acceleration `a` for `dt` on its current curve
/// (angular velocity `v / r_c`). Motion ends early when the speed reaches 0.
pub fn flow_robot(pre: &RobotState, a: f64, dt: f64) -> Result<FlowResult> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::Dynamics(format!("negative or non-finite dt {dt}")));
    }
    if pre.r_c == 0.0 || !pre.r_c.is_finite() {
        return Err(Error::Dynamics("r_c must be nonzero and finite".into()));
    }
    if (pre.d_r.norm_2() - 1.0).abs() > LINK_TOL {
        return Err(Error::Dynamics(format!("|d_r| = {} is not 1", pre.d_r.norm_2())));
    }
    if pre.v_r < 0.0 || !a.is_finite() {
        return Err(Error::Dynamics(format!("v_r = {} must be >= 0", pre.v_r)));
    }
    Ok(flow_unchecked(pre, a, dt))
}

pub(crate) fn flow_unchecked(pre: &RobotState, a: f64, dt: f64) -> FlowResult {
    let (elapsed, stopped_at, s) = speed_profile(pre.v_r, a, dt);
    let v = if stopped_at.is_some() { 0.0 } else { (pre.v_r + a * elapsed).max(0.0) };
    let (p, d, phi) = arc_pose(pre.p_r, pre.d_r, pre.r_c, s);
    let post = RobotState {
        p_r: p,
        v_r: v,
        a_r: pre.a_r,
        d_r: d,
        omega_r: v / pre.r_c,
        r_c: pre.r_c,
        p_c: RobotState::implied_center(pre.p_r, pre.d_r, pre.r_c),
        beta: pre.beta + phi,
        t: pre.t + elapsed,
    };
    FlowResult { post, stopped_at, elapsed }
}

/// Robot position `tau` seconds into an interval.
pub(crate) fn robot_position_at(pre: &RobotState, a: f64, tau: f64) -> Vec2 {
    let (_, _, s) = speed_profile(pre.v_r, a, tau);
    arc_pose(pre.p_r, pre.d_r, pre.r_c, s).0
}

/// Uniform straight-line obstacle motion.
pub fn flow_obstacle(pre: &ObstacleState, dt: f64) -> ObstacleState {
    ObstacleState { p_o: pre.p_o + pre.v_o * dt, ..*pre }
}

/// Obstacle moving along `d_o` with speed changing at rate `a_o`, stopping at 0.
pub fn flow_refined_obstacle(pre: &ObstacleState, dt: f64) -> Result<ObstacleState> {
    if !(dt >= 0.0) {
        return Err(Error::Dynamics(format!("negative dt {dt}")));
    }
    if (pre.d_o.norm_2() - 1.0).abs() > LINK_TOL {
        return Err(Error::Dynamics("|d_o| is not 1".into()));
    }
    let speed = pre.v_o.dot(pre.d_o);
    if speed < -LINK_TOL || (pre.v_o - pre.d_o * speed).norm_2() > LINK_TOL * pre.v_max.max(1.0) {
        return Err(Error::Dynamics("v_o must point along d_o".into()));
    }
    let speed = speed.max(0.0);
    let end_speed = speed + pre.a_o * dt;
    if end_speed > pre.v_max + LINK_TOL {
        return Err(Error::Dynamics(format!(
            "speed {end_speed} would exceed v_max {}",
            pre.v_max
        )));
    }
    let (elapsed, stopped, s) = speed_profile(speed, pre.a_o, dt);
    let v = if stopped.is_some() { 0.0 } else { (speed + pre.a_o * elapsed).max(0.0) };
    Ok(ObstacleState {
        p_o: pre.p_o + pre.d_o * s,
        v_o: pre.d_o * v,
        ..*pre
    })
}

/// Outcome of the per-step differential-invariant checks; failures are data.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiffInvariantReport {
    pub failures: Vec<String>,
}

impl DiffInvariantReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check the differential invariants of one interval: time is
/// nonnegative, the heading stays a unit vector, `v = v₀ + a t`, the robot
/// stays in the square of half side `t (v - a t / 2)` around its start, and
/// each obstacle stays within `obstacle_elapsed * v_bound` per axis.
///
/// `t` is `post.t - pre.t`, the time the robot evolved.
pub fn check_differential_invariants(
    pre: &RobotState,
    post: &RobotState,
    accel: f64,
    v_bound: f64,
    pre_obs: &[ObstacleState],
    post_obs: &[ObstacleState],
    obstacle_elapsed: f64,
) -> DiffInvariantReport {
    let mut failures = Vec::new();
    let t = post.t - pre.t;
    if t < 0.0 || obstacle_elapsed < 0.0 {
        failures.push(format!("negative time {t}"));
    }
    if (post.d_r.norm_2() - 1.0).abs() > 1e-9 {
        failures.push(format!("|d_r| = {}", post.d_r.norm_2()));
    }
    if (post.v_r - (pre.v_r + accel * t)).abs() > 1e-12 * (1.0 + pre.v_r.abs()) {
        failures.push(format!(
            "v = {} but v0 + a t = {}",
            post.v_r,
            pre.v_r + accel * t
        ));
    }
    let half = t * (post.v_r - accel * t / 2.0) + 1e-9;
    let dp = post.p_r - pre.p_r;
    if dp.x.abs() > half || dp.y.abs() > half {
        failures.push(format!(
            "robot moved ({}, {}) outside bounding square {}",
            dp.x, dp.y, half
        ));
    }
    if pre_obs.len() != post_obs.len() {
        failures.push("obstacle count changed".into());
    }
    let obs_half = obstacle_elapsed * v_bound + 1e-9;
    for (i, (a, b)) in pre_obs.iter().zip(post_obs).enumerate() {
        let d = b.p_o - a.p_o;
        if d.x.abs() > obs_half || d.y.abs() > obs_half {
            failures.push(format!(
                "obstacle {i} moved ({}, {}) outside bounding square {}",
                d.x, d.y, obs_half
            ));
        }
    }
    DiffInvariantReport { failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Fixed-step RK4 on p' = v d, v' = a, d' = (v / r_c) d^⊥, stopping at v = 0.
    fn rk4(pre: &RobotState, a: f64, dt: f64) -> (Vec2, Vec2, f64) {
        let stop = if a < 0.0 { (-pre.v_r / a).min(dt) } else { dt };
        let n = ((stop / 1e-4).ceil() as usize).max(1);
        let h = stop / n as f64;
        let rc = pre.r_c;
        let f = |_p: Vec2, v: f64, d: Vec2| (d * v, a, d.perp() * (v / rc));
        let (mut p, mut v, mut d) = (pre.p_r, pre.v_r, pre.d_r);
        for _ in 0..n {
            let k1 = f(p, v, d);
            let k2 = f(p + k1.0 * (h / 2.0), v + k1.1 * h / 2.0, d + k1.2 * (h / 2.0));
            let k3 = f(p + k2.0 * (h / 2.0), v + k2.1 * h / 2.0, d + k2.2 * (h / 2.0));
            let k4 = f(p + k3.0 * h, v + k3.1 * h, d + k3.2 * h);
            p += (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * (h / 6.0);
            v += (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) * h / 6.0;
            d += (k1.2 + k2.2 * 2.0 + k3.2 * 2.0 + k4.2) * (h / 6.0);
        }
        (p, d, v.max(0.0))
    }

    #[test]
    fn quarter_arc() {
        let pre = RobotState::moving(Vec2::ZERO, Vec2::new(0.0, -1.0), 2.0, 2.0);
        assert_eq!(pre.p_c, Vec2::new(2.0, 0.0));
        assert_eq!(pre.omega_r, 1.0);
        let r = flow_robot(&pre, 0.0, FRAC_PI_2).unwrap();
        assert!((r.post.p_r - Vec2::new(2.0, -2.0)).norm_2() < 1e-12);
        assert!((r.post.d_r - Vec2::new(1.0, 0.0)).norm_2() < 1e-12);
        assert_eq!(r.post.v_r, 2.0);
        assert!((r.post.beta - FRAC_PI_2).abs() < 1e-12);
        assert!(r.post.invariant_violations().is_empty());
        let rep = check_differential_invariants(&pre, &r.post, 0.0, 0.0, &[], &[], FRAC_PI_2);
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn braking_stops_early() {
        let pre = RobotState::moving(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 1e6);
        let r = flow_robot(&pre, -1.0, 2.0).unwrap();
        assert_eq!(r.stopped_at, Some(1.0));
        assert_eq!(r.elapsed, 1.0);
        assert_eq!(r.post.v_r, 0.0);
        assert!((r.post.p_r.x - 0.5).abs() < 1e-12);
        assert!((r.post.p_r.y - 0.25 / 2e6).abs() < 1e-12);
    }

    #[test]
    fn rest_is_fixed_point() {
        let pre = RobotState::at_rest(Vec2::new(3.0, 4.0), Vec2::from_angle(1.0), -2.5);
        let r = flow_robot(&pre, 0.0, 7.0).unwrap();
        assert_eq!(r.post.p_r, pre.p_r);
        assert_eq!(r.post.d_r, pre.d_r);
        assert_eq!(r.post.v_r, 0.0);
        let r = flow_robot(&pre, -1.0, 7.0).unwrap();
        assert_eq!(r.stopped_at, Some(0.0));
        assert_eq!(r.post.p_r, pre.p_r);
    }

    #[test]
    fn rejects_bad_input() {
        let pre = RobotState::at_rest(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0);
        assert!(flow_robot(&pre, 0.0, -1.0).is_err());
        let mut z = pre;
        z.r_c = 0.0;
        assert!(flow_robot(&z, 0.0, 1.0).is_err());
        let mut d = pre;
        d.d_r = Vec2::new(1.0, 1.0);
        assert!(flow_robot(&d, 0.0, 1.0).is_err());
    }

    #[test]
    fn obstacle_examples() {
        let o = ObstacleState::new(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0);
        assert_eq!(flow_obstacle(&o, 2.0).p_o, Vec2::new(2.0, 0.0));
        let o = ObstacleState::new(Vec2::new(1.0, 1.0), Vec2::ZERO, 1.0);
        assert_eq!(flow_obstacle(&o, 2.0).p_o, Vec2::new(1.0, 1.0));
        let o = ObstacleState::new(Vec2::new(1.0, 1.0), Vec2::new(-1.0, 2.0), 3.0);
        assert_eq!(flow_obstacle(&o, 0.5).p_o, Vec2::new(0.5, 2.0));
    }

    #[test]
    fn refined_obstacle_examples() {
        let mut o = ObstacleState::new(Vec2::ZERO, Vec2::new(1.0, 0.0), 2.0);
        o.a_o = 1.0;
        let r = flow_refined_obstacle(&o, 1.0).unwrap();
        assert!((r.p_o - Vec2::new(1.5, 0.0)).norm_2() < 1e-15);
        assert!((r.speed() - 2.0).abs() < 1e-15);
        o.a_o = 0.0;
        assert_eq!(flow_refined_obstacle(&o, 2.0).unwrap().p_o, Vec2::new(2.0, 0.0));
        o.a_o = -1.0;
        let r = flow_refined_obstacle(&o, 2.0).unwrap();
        assert!((r.p_o - Vec2::new(0.5, 0.0)).norm_2() < 1e-15);
        assert_eq!(r.speed(), 0.0);
        o.a_o = 5.0;
        assert!(flow_refined_obstacle(&o, 1.0).is_err(), "would exceed v_max");
    }

    #[test]
    fn teleport_fails_bounding_square() {
        let pre = RobotState::moving(Vec2::ZERO, Vec2::new(1.0, 0.0), 1.0, 1e6);
        let mut post = flow_robot(&pre, 0.0, 0.05).unwrap().post;
        post.p_r.y += 1.0;
        let rep = check_differential_invariants(&pre, &post, 0.0, 1.0, &[], &[], 0.05);
        assert!(!rep.ok());
        assert!(rep.failures[0].contains("bounding square"));
        let same = check_differential_invariants(&pre, &pre, 0.0, 1.0, &[], &[], 0.0);
        assert!(same.ok());
    }

    #[test]
    fn full_circle_returns_home() {
        let pre = RobotState::moving(Vec2::new(1.0, 1.0), Vec2::from_angle(0.7), 1.0, -0.5);
        let r = flow_robot(&pre, 0.0, PI).unwrap();
        assert!((r.post.p_r - pre.p_r).norm_2() < 1e-12);
    }

    fn state_strategy() -> impl Strategy<Value = (RobotState, f64, f64)> {
        (
            -10.0f64..10.0,
            -10.0f64..10.0,
            0.0f64..(2.0 * PI),
            0.0f64..10.0,
            -10.0f64..10.0,
            (-1.0f64..7.0, prop::bool::ANY),
            0.0f64..1.0,
        )
            .prop_map(|(x, y, th, v, a, (lr, pos), dt)| {
                let r = 10f64.powf(lr).min(1e6);
                let r = if pos { r } else { -r };
                (RobotState::moving(Vec2::new(x, y), Vec2::from_angle(th), v, r), a, dt)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn closed_form_matches_rk4((pre, a, dt) in state_strategy()) {
            let r = flow_robot(&pre, a, dt).unwrap();
            let (p, d, v) = rk4(&pre, a, dt);
            prop_assert!((r.post.p_r - p).norm_2() < 1e-6, "{:?} vs {:?}", r.post.p_r, p);
            prop_assert!((r.post.d_r - d).norm_2() < 1e-6);
            prop_assert!((r.post.v_r - v).abs() < 1e-9);
        }

        #[test]
        fn group_property((pre, a, dt) in state_strategy(), split in 0.0f64..1.0) {
            let (t1, t2) = (dt * split, dt * (1.0 - split));
            let whole = flow_robot(&pre, a, dt).unwrap();
            prop_assume!(whole.stopped_at.is_none());
            let half = flow_robot(&pre, a, t1).unwrap().post;
            let two = flow_robot(&half, a, t2).unwrap().post;
            prop_assert!((whole.post.p_r - two.p_r).norm_2() < 1e-9);
            prop_assert!((whole.post.d_r - two.d_r).norm_2() < 1e-9);
            prop_assert!((whole.post.v_r - two.v_r).abs() < 1e-9);
        }

        #[test]
        fn flow_preserves_invariants((pre, a, dt) in state_strategy()) {
            let r = flow_robot(&pre, a, dt).unwrap();
            prop_assert!((r.post.d_r.norm_2() - 1.0).abs() < 1e-12);
            prop_assert!(r.post.v_r >= 0.0);
            prop_assert!(r.elapsed <= dt);
            prop_assert!((r.post.omega_r * r.post.r_c - r.post.v_r).abs() <= 1e-15 * (1.0 + r.post.v_r));
            prop_assert!(r.post.invariant_violations().is_empty(), "{:?}", r.post.invariant_violations());
            let rep = check_differential_invariants(&pre, &r.post, a, 0.0, &[], &[], dt);
            prop_assert!(rep.ok(), "{:?}", rep.failures);
        }
    }
}
