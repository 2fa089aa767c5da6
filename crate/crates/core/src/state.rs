//! Domain types shared by every module: robot and obstacle state, world
//! parameters, safety modes and refinements, and controller outcomes.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Absolute tolerance for the geometric link invariants.
pub const LINK_TOL: f64 = 1e-9;

/// Radius used to represent straight-line motion.
pub const STRAIGHT_RADIUS: f64 = 1e6;

/// Smallest curve radius the candidate generator emits.
pub const MIN_RADIUS: f64 = 0.1;

/// Symbolic bounds of the world. Field names in files follow the usual
/// symbols (`A`, `b`, `V`, `Omega`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldParams {
    /// Maximum acceleration A (m/s²).
    #[serde(rename = "A")]
    pub a_max: f64,
    /// Guaranteed braking deceleration b (m/s²).
    pub b: f64,
    /// Obstacle braking deceleration b_o (m/s²).
    pub b_o: f64,
    /// Control cycle upper bound ε (s).
    pub eps: f64,
    /// Obstacle control cycle ε_o (s); falls back to `eps`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_o: Option<f64>,
    /// Maximum obstacle speed V (m/s).
    #[serde(rename = "V")]
    pub v_obs: f64,
    /// Maximum rotational velocity Ω (rad/s).
    #[serde(rename = "Omega")]
    pub omega_max: f64,
    /// Obstacle reaction time τ (s).
    pub tau: f64,
    /// Angular width γ of the observable sector (rad).
    pub gamma: f64,
    #[serde(rename = "Delta_p")]
    pub delta_p: f64,
    #[serde(rename = "Delta_a")]
    pub delta_a: f64,
    #[serde(rename = "Delta_v")]
    pub delta_v: f64,
    /// Obstacle minimum speed at intersections (m/s).
    #[serde(rename = "V_min")]
    pub v_min: f64,
    /// Waypoint approach speed (m/s).
    #[serde(rename = "V_g")]
    pub v_goal: f64,
    /// Half width of the waypoint goal region (m).
    #[serde(rename = "Delta_g")]
    pub delta_goal: f64,
}

impl Default for WorldParams {
    fn default() -> Self {
        WorldParams {
            a_max: 1.0,
            b: 1.0,
            b_o: 1.0,
            eps: 0.05,
            eps_o: None,
            v_obs: 1.0,
            omega_max: 1.0,
            tau: 0.0,
            gamma: std::f64::consts::PI,
            delta_p: 0.0,
            delta_a: 1.0,
            delta_v: 0.0,
            v_min: 0.1,
            v_goal: 0.5,
            delta_goal: 0.5,
        }
    }
}

impl WorldParams {
    pub const FIELD_NAMES: [&'static str; 15] = [
        "A", "b", "b_o", "eps", "eps_o", "V", "Omega", "tau", "gamma", "Delta_p", "Delta_a",
        "Delta_v", "V_min", "V_g", "Delta_g",
    ];

    pub fn eps_obstacle(&self) -> f64 {
        self.eps_o.unwrap_or(self.eps)
    }

    /// Set a field by its file name, e.g. `set("A", 2.0)`.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "A" => &mut self.a_max,
            "b" => &mut self.b,
            "b_o" => &mut self.b_o,
            "eps" => &mut self.eps,
            "eps_o" => {
                self.eps_o = Some(value);
                return Ok(());
            }
            "V" => &mut self.v_obs,
            "Omega" => &mut self.omega_max,
            "tau" => &mut self.tau,
            "gamma" => &mut self.gamma,
            "Delta_p" => &mut self.delta_p,
            "Delta_a" => &mut self.delta_a,
            "Delta_v" => &mut self.delta_v,
            "V_min" => &mut self.v_min,
            "V_g" => &mut self.v_goal,
            "Delta_g" => &mut self.delta_goal,
            other => return Err(Error::UnknownParameter(other.to_string())),
        };
        *slot = value;
        Ok(())
    }

    /// Apply `key=value` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::UnknownParameter(o.to_string()))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::UnknownParameter(format!("{o} (value is not a number)")))?;
            self.set(k.trim(), value)?;
        }
        Ok(())
    }

    /// Every violated parameter bound, as human-readable text.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                out.push(msg.to_string());
            }
        };
        need(self.a_max >= 0.0 && self.a_max.is_finite(), "A must be >= 0");
        need(self.b > 0.0 && self.b.is_finite(), "b must be > 0");
        need(self.b_o > 0.0 && self.b_o.is_finite(), "b_o must be > 0");
        need(self.eps > 0.0 && self.eps.is_finite(), "eps must be > 0");
        if let Some(e) = self.eps_o {
            need(e > 0.0 && e.is_finite(), "eps_o must be > 0");
        }
        need(self.v_obs >= 0.0 && self.v_obs.is_finite(), "V must be >= 0");
        need(self.omega_max >= 0.0 && self.omega_max.is_finite(), "Omega must be >= 0");
        need(self.tau >= 0.0 && self.tau.is_finite(), "tau must be >= 0");
        need(self.gamma > 0.0 && self.gamma.is_finite(), "gamma must be > 0");
        need(self.delta_p >= 0.0 && self.delta_p.is_finite(), "Delta_p must be >= 0");
        need(self.delta_a > 0.0 && self.delta_a <= 1.0, "Delta_a must be in (0, 1]");
        need(self.delta_v >= 0.0 && self.delta_v.is_finite(), "Delta_v must be >= 0");
        need(self.v_min > 0.0 && self.v_min.is_finite(), "V_min must be > 0");
        need(self.v_goal > 0.0 && self.v_goal.is_finite(), "V_g must be > 0");
        need(self.delta_goal > 0.0 && self.delta_goal.is_finite(), "Delta_g must be > 0");
        out
    }
}

/// Robot pose and motion. The robot drives on a circle of signed radius
/// `r_c` (positive is counter-clockwise) around `p_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub p_r: Vec2,
    pub v_r: f64,
    pub a_r: f64,
    pub d_r: Vec2,
    pub omega_r: f64,
    pub r_c: f64,
    pub p_c: Vec2,
    /// Angular progress on the current curve.
    pub beta: f64,
    /// Time evolved since the last control decision.
    pub t: f64,
}

impl RobotState {
    /// Stopped robot at `p_r` facing `d_r`, on a curve of radius `r_c`.
    pub fn at_rest(p_r: Vec2, d_r: Vec2, r_c: f64) -> Self {
        Self::moving(p_r, d_r, 0.0, r_c)
    }

    pub fn moving(p_r: Vec2, d_r: Vec2, v_r: f64, r_c: f64) -> Self {
        RobotState {
            p_r,
            v_r,
            a_r: 0.0,
            d_r,
            omega_r: v_r / r_c,
            r_c,
            p_c: Self::implied_center(p_r, d_r, r_c),
            beta: 0.0,
            t: 0.0,
        }
    }

    /// Center of the circle through `p_r` with tangent `d_r` and signed
    /// radius `r_c`, from `d_r = (p_r - p_c)^⊥ / r_c`.
    pub fn implied_center(p_r: Vec2, d_r: Vec2, r_c: f64) -> Vec2 {
        p_r + d_r.perp() * r_c
    }

    /// Every violated state invariant.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let finite = self.p_r.is_finite()
            && self.d_r.is_finite()
            && self.p_c.is_finite()
            && [self.v_r, self.a_r, self.omega_r, self.r_c, self.beta, self.t]
                .iter()
                .all(|x| x.is_finite());
        if !finite {
            out.push("non-finite robot state".into());
            return out;
        }
        if self.v_r < 0.0 {
            out.push(format!("v_r = {} < 0", self.v_r));
        }
        if (self.d_r.norm_2() - 1.0).abs() > LINK_TOL {
            out.push(format!("|d_r| = {} is not 1", self.d_r.norm_2()));
        }
        if self.r_c == 0.0 {
            out.push("r_c must be nonzero".into());
            return out;
        }
        if (self.r_c * self.omega_r - self.v_r).abs() > LINK_TOL {
            out.push(format!(
                "r_c * omega_r = {} differs from v_r = {}",
                self.r_c * self.omega_r,
                self.v_r
            ));
        }
        let tol = LINK_TOL * self.r_c.abs().max(1.0);
        let rel = self.p_r - self.p_c;
        if (rel.norm_2() - self.r_c.abs()).abs() > tol {
            out.push(format!(
                "|p_r - p_c| = {} differs from |r_c| = {}",
                rel.norm_2(),
                self.r_c.abs()
            ));
        } else if (rel.perp() * (1.0 / self.r_c) - self.d_r).norm_2() > LINK_TOL.max(tol / self.r_c.abs()) {
            out.push("d_r is not tangent to the curve".into());
        }
        out
    }
}

/// One obstacle. `d_o` and `a_o` are only used by the refined
/// (acceleration-controlled) obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleState {
    pub p_o: Vec2,
    pub v_o: Vec2,
    pub v_max: f64,
    pub d_o: Vec2,
    pub a_o: f64,
    /// Positive iff the obstacle was visible at the last curve choice.
    pub visible: f64,
}

impl ObstacleState {
    pub fn new(p_o: Vec2, v_o: Vec2, v_max: f64) -> Self {
        ObstacleState {
            p_o,
            v_o,
            v_max,
            d_o: v_o.normalized().unwrap_or(Vec2::new(1.0, 0.0)),
            a_o: 0.0,
            visible: 1.0,
        }
    }

    pub fn stationary(p_o: Vec2) -> Self {
        Self::new(p_o, Vec2::ZERO, 0.0)
    }

    pub fn speed(&self) -> f64 {
        self.v_o.norm_2()
    }
}

macro_rules! named_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal $(| $alias:literal)*),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text $(, alias = $alias)*)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text $(| $alias)* => Ok($name::$variant),)+
                    other => Err(format!(
                        "unknown {} `{}` (expected one of: {})",
                        stringify!($name),
                        other,
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

named_enum! {
    /// Which safety guarantee the robot controller provides.
    SafetyMode {
        Static => "static",
        Passive => "passive",
        PassiveFriendly => "friendly" | "passive_friendly",
        PassiveOrientation => "orientation" | "passive_orientation",
    }
}

named_enum! {
    /// Model refinements layered on the passive controller.
    Refinement {
        ActualAccel => "actual_accel",
        TrajectoryDistance => "trajectory_distance",
        LocationUncertainty => "location_uncertainty",
        ActuatorPerturbation => "actuator_perturbation",
        VelocityUncertainty => "velocity_uncertainty",
        NonSync => "non_sync",
        MultiObstacle => "multi_obstacle",
    }
}

named_enum! {
    /// How obstacles choose their velocity.
    ObstaclePolicyKind {
        Random => "random",
        HeadOn => "head_on",
        Pursuit => "pursuit",
        RefinedAccel => "refined_accel",
        Blocker => "blocker",
    }
}

/// A set of refinements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Refinement>", into = "Vec<Refinement>")]
pub struct Refinements(u8);

impl Refinements {
    pub const fn empty() -> Self {
        Refinements(0)
    }

    pub fn of(items: &[Refinement]) -> Self {
        items.iter().fold(Self::empty(), |s, r| s.with(*r))
    }

    fn bit(r: Refinement) -> u8 {
        1 << Refinement::ALL.iter().position(|x| *x == r).unwrap()
    }

    pub fn with(self, r: Refinement) -> Self {
        Refinements(self.0 | Self::bit(r))
    }

    pub fn contains(self, r: Refinement) -> bool {
        self.0 & Self::bit(r) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Refinement> {
        Refinement::ALL.iter().copied().filter(move |r| self.contains(*r))
    }
}

impl From<Vec<Refinement>> for Refinements {
    fn from(v: Vec<Refinement>) -> Self {
        Refinements::of(&v)
    }
}

impl From<Refinements> for Vec<Refinement> {
    fn from(r: Refinements) -> Self {
        r.iter().collect()
    }
}

impl fmt::Display for Refinements {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(Refinement::as_str).collect();
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join("+"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Brake,
    Stay,
    Accelerate,
}

/// Outcome of one robot control decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlChoice {
    pub branch: Branch,
    pub a_r: f64,
    pub omega_r: f64,
    pub r_c: f64,
    pub p_c: Vec2,
    /// Turn in place (reverse `d_r`) while stopped.
    pub d_flip: bool,
    /// Per-obstacle visibility recorded with a new curve (orientation mode).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub visible: Vec<bool>,
}

impl ControlChoice {
    /// Full braking on the current curve.
    pub fn brake(robot: &RobotState, params: &WorldParams) -> Self {
        ControlChoice {
            branch: Branch::Brake,
            a_r: -params.b,
            omega_r: robot.v_r / robot.r_c,
            r_c: robot.r_c,
            p_c: robot.p_c,
            d_flip: false,
            visible: Vec::new(),
        }
    }

    /// Remain stopped.
    pub fn stay(robot: &RobotState) -> Self {
        ControlChoice {
            branch: Branch::Stay,
            a_r: 0.0,
            omega_r: 0.0,
            r_c: robot.r_c,
            p_c: robot.p_c,
            d_flip: false,
            visible: Vec::new(),
        }
    }

    /// Every violated branch invariant with respect to the deciding speed `v_r`.
    pub fn violations(&self, v_r: f64, params: &WorldParams) -> Vec<String> {
        let mut out = Vec::new();
        match self.branch {
            Branch::Brake => {
                if (self.a_r + params.b).abs() > LINK_TOL {
                    out.push(format!("brake with a_r = {} != -b", self.a_r));
                }
            }
            Branch::Stay => {
                if self.a_r != 0.0 || self.omega_r != 0.0 {
                    out.push("stay must have a_r = 0 and omega_r = 0".into());
                }
            }
            Branch::Accelerate => {
                if self.a_r < -params.b - LINK_TOL || self.a_r > params.a_max + LINK_TOL {
                    out.push(format!("a_r = {} outside [-b, A]", self.a_r));
                }
                if self.omega_r.abs() > params.omega_max + LINK_TOL {
                    out.push(format!("|omega_r| = {} exceeds Omega", self.omega_r.abs()));
                }
                if self.r_c == 0.0 {
                    out.push("r_c must be nonzero".into());
                } else if (self.r_c * self.omega_r - v_r).abs() > LINK_TOL {
                    out.push("r_c * omega_r differs from v_r".into());
                }
            }
        }
        out
    }
}
