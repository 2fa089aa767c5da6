//! Scenario description, validation of initial conditions, and the TOML
//! scenario file format.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::safety::{eta_obs, invariant_slack};
use crate::state::{
    ObstaclePolicyKind, ObstacleState, Refinement, Refinements, RobotState, SafetyMode,
    WorldParams, LINK_TOL, STRAIGHT_RADIUS,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Default cap on obstacle re-decisions per interval in non-synchronized runs.
pub const DEFAULT_NONSYNC_CAP: usize = 8;

/// Straight-line waypoint task. Positions are measured along the robot's
/// initial heading from its initial position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaypointGoal {
    pub p_g: f64,
    /// Countdown `T` at the start; `None` for the untimed task.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<f64>,
}

/// Intersection task: the robot drives along `y = p_x.y` in +x, the
/// obstacle along `x = p_x.x` in +y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionGoal {
    pub p_x: Vec2,
    /// Deadline `D` for the timed variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Goal {
    Point { p: Vec2 },
    Waypoint(WaypointGoal),
    Intersection(IntersectionGoal),
}

/// Everything needed to run one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub params: WorldParams,
    pub mode: SafetyMode,
    pub refinements: Refinements,
    pub robot: RobotState,
    pub obstacles: Vec<ObstacleState>,
    pub policy: ObstaclePolicyKind,
    pub horizon: f64,
    pub seed: u64,
    pub goal: Option<Goal>,
    /// Scale on the controller's safety thresholds; 1 is unmutated.
    pub kappa: f64,
    /// Flow for exactly ε each cycle instead of a sampled duration.
    pub deterministic: bool,
    pub nonsync_cap: usize,
}

impl Scenario {
    /// A stopped robot at the origin heading +x, no obstacles, default params.
    pub fn new(mode: SafetyMode, params: WorldParams) -> Self {
        Scenario {
            params,
            mode,
            refinements: Refinements::empty(),
            robot: RobotState::at_rest(Vec2::ZERO, Vec2::new(1.0, 0.0), STRAIGHT_RADIUS),
            obstacles: Vec::new(),
            policy: ObstaclePolicyKind::Pursuit,
            horizon: 30.0,
            seed: 0,
            goal: None,
            kappa: 1.0,
            deterministic: false,
            nonsync_cap: DEFAULT_NONSYNC_CAP,
        }
    }

    pub fn has(&self, r: Refinement) -> bool {
        self.refinements.contains(r)
    }

    /// Load a TOML scenario file.
    pub fn from_toml_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::ScenarioFile(e.to_string()))?;
        Ok(file.into_scenario())
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(&ScenarioFile::from_scenario(self))
            .map_err(|e| Error::ScenarioFile(e.to_string()))
    }
}

/// True iff the waypoint task can be completed at all (`φ_wp` without the
/// position and speed parts).
pub fn waypoint_params_ok(params: &WorldParams) -> bool {
    let vg = params.v_goal;
    params.b > 0.0
        && params.a_max > 0.0
        && params.eps > 0.0
        && vg > 0.0
        && vg * params.eps + vg * vg / (2.0 * params.b) < 2.0 * params.delta_goal
}

/// Every violated parameter bound or initial condition. Empty iff valid.
pub fn validate_scenario(s: &Scenario) -> Vec<String> {
    let mut out = s.params.violations();
    if !out.is_empty() {
        return out;
    }
    let p = &s.params;
    if !(s.horizon > 0.0 && s.horizon.is_finite()) {
        out.push("horizon must be > 0".into());
    }
    if !(s.kappa > 0.0 && s.kappa <= 1.0) {
        out.push("kappa must be in (0, 1]".into());
    }
    out.extend(s.robot.invariant_violations());
    let multi = s.has(Refinement::MultiObstacle);
    for (i, o) in s.obstacles.iter().enumerate() {
        if !o.p_o.is_finite() || !o.v_o.is_finite() {
            out.push(format!("obstacle {i} has non-finite state"));
        }
        if o.speed() > o.v_max + LINK_TOL {
            out.push(format!("obstacle {i} speed exceeds its bound"));
        }
        if !multi && o.v_max > p.v_obs + LINK_TOL {
            out.push(format!("obstacle {i} bound exceeds V"));
        }
    }
    if !multi && s.obstacles.len() > 1 {
        out.push("more than one obstacle needs the multi_obstacle refinement".into());
    }
    if !out.is_empty() {
        return out;
    }
    if s.mode == SafetyMode::PassiveFriendly
        && s.obstacles.iter().any(|o| !eta_obs((s.robot.p_r - o.p_o).norm_2(), p))
    {
        out.push("η_obs violated".into());
    }
    let slack = invariant_slack(s.mode, s.refinements, &s.robot, &s.obstacles, p);
    if !(slack > 0.0) {
        out.push("initial state violates the loop invariant".into());
    }
    match s.goal {
        Some(Goal::Waypoint(g)) => {
            if s.robot.v_r != 0.0 {
                out.push("waypoint task must start stopped".into());
            }
            if !(0.0 < g.p_g - p.delta_goal) {
                out.push("waypoint task must start outside the goal region".into());
            }
            if !waypoint_params_ok(p) {
                out.push("V_g too large for the goal region".into());
            }
        }
        Some(Goal::Intersection(g)) => {
            let r = &s.robot;
            if (r.p_r.y - g.p_x.y).abs() > LINK_TOL || (r.d_r - Vec2::new(1.0, 0.0)).norm_2() > LINK_TOL {
                out.push("robot must drive along +x through the intersection".into());
            }
            if s.obstacles.len() != 1 {
                out.push("intersection task needs exactly one obstacle".into());
            } else {
                let o = &s.obstacles[0];
                if (o.p_o.x - g.p_x.x).abs() > LINK_TOL || o.v_o.x != 0.0 {
                    out.push("obstacle must drive along the crossing road".into());
                }
                if o.v_o.y < p.v_min {
                    out.push("obstacle speed below V_min".into());
                }
            }
        }
        _ => {}
    }
    out
}

/// On-disk shape of a scenario. Unset fields take the defaults of
/// [`Scenario::new`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mode: SafetyMode,
    #[serde(default)]
    pub refinements: Refinements,
    #[serde(default = "default_policy")]
    pub policy: ObstaclePolicyKind,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default = "default_cap")]
    pub nonsync_cap: usize,
    #[serde(default)]
    pub params: WorldParams,
    #[serde(default)]
    pub robot: RobotFile,
    #[serde(default)]
    pub obstacles: Vec<ObstacleFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<Goal>,
}

fn default_policy() -> ObstaclePolicyKind {
    ObstaclePolicyKind::Pursuit
}
fn default_horizon() -> f64 {
    30.0
}
fn default_kappa() -> f64 {
    1.0
}
fn default_cap() -> usize {
    DEFAULT_NONSYNC_CAP
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotFile {
    pub p: Vec2,
    pub d: Vec2,
    #[serde(default)]
    pub v: f64,
    #[serde(default = "default_radius")]
    pub r_c: f64,
}

fn default_radius() -> f64 {
    STRAIGHT_RADIUS
}

impl Default for RobotFile {
    fn default() -> Self {
        RobotFile { p: Vec2::ZERO, d: Vec2::new(1.0, 0.0), v: 0.0, r_c: STRAIGHT_RADIUS }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleFile {
    pub p: Vec2,
    #[serde(default)]
    pub v: Vec2,
    /// Per-obstacle speed bound; defaults to `V`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_max: Option<f64>,
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Scenario {
        let mut s = Scenario::new(self.mode, self.params);
        s.refinements = self.refinements;
        s.policy = self.policy;
        s.horizon = self.horizon;
        s.seed = self.seed;
        s.kappa = self.kappa;
        s.deterministic = self.deterministic;
        s.nonsync_cap = self.nonsync_cap;
        s.robot = RobotState::moving(self.robot.p, self.robot.d, self.robot.v, self.robot.r_c);
        s.obstacles = self
            .obstacles
            .iter()
            .map(|o| ObstacleState::new(o.p, o.v, o.v_max.unwrap_or(self.params.v_obs)))
            .collect();
        s.goal = self.goal;
        s
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        ScenarioFile {
            mode: s.mode,
            refinements: s.refinements,
            policy: s.policy,
            horizon: s.horizon,
            seed: s.seed,
            kappa: s.kappa,
            deterministic: s.deterministic,
            nonsync_cap: s.nonsync_cap,
            params: s.params,
            robot: RobotFile { p: s.robot.p_r, d: s.robot.d_r, v: s.robot.v_r, r_c: s.robot.r_c },
            obstacles: s
                .obstacles
                .iter()
                .map(|o| ObstacleFile {
                    p: o.p_o,
                    v: o.v_o,
                    v_max: (o.v_max != s.params.v_obs).then_some(o.v_max),
                })
                .collect(),
            goal: s.goal,
        }
    }
}
