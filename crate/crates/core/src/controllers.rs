//! The dynamic-window robot controller. The verified models leave the choice
//! among safe curves open; here it is resolved by a fixed candidate grid and
//! a progress score.

use crate::dynamics::{arc_pose, speed_profile};
use crate::geom::{norm_inf, Vec2};
use crate::safety::{is_safe_curve, obstacle_bound, safe_distance, visibility, SafetyQuery};
use crate::state::{
    Branch, ControlChoice, ObstacleState, Refinement, Refinements, RobotState, SafetyMode,
    WorldParams, MIN_RADIUS, STRAIGHT_RADIUS,
};

/// Accelerations and target rotational velocities tried each cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub accelerations: Vec<f64>,
    pub omegas: Vec<f64>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

impl CandidateSet {
    /// Uniform grid over `[-b, A] x [-Ω, Ω]`.
    pub fn grid(params: &WorldParams, n_accel: usize, n_omega: usize) -> Self {
        let mut omegas = linspace(-params.omega_max, params.omega_max, n_omega);
        // Make the centre exactly straight.
        if n_omega % 2 == 1 {
            omegas[n_omega / 2] = 0.0;
        }
        CandidateSet {
            accelerations: linspace(-params.b, params.a_max, n_accel),
            omegas,
        }
    }

    pub fn default_for(params: &WorldParams) -> Self {
        Self::grid(params, 9, 21)
    }

    pub fn violations(&self, params: &WorldParams) -> Vec<String> {
        let mut out = Vec::new();
        if self.accelerations.iter().any(|a| *a < -params.b || *a > params.a_max) {
            out.push("acceleration candidate outside [-b, A]".into());
        }
        if self.omegas.iter().any(|w| w.abs() > params.omega_max) {
            out.push("rotational candidate outside [-Omega, Omega]".into());
        }
        out
    }
}

/// What the robot knows when deciding: possibly perturbed own state, an
/// exact stopped flag, and obstacle positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub robot: RobotState,
    pub stopped: bool,
    pub obstacles: Vec<ObstacleState>,
}

/// A configured dynamic-window controller.
#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    pub mode: SafetyMode,
    pub refinements: Refinements,
    pub params: WorldParams,
    pub candidates: CandidateSet,
    /// Scale on the safety thresholds; 1 is the verified controller.
    pub margin: f64,
    pub goal: Option<Vec2>,
}

#[derive(Debug, Clone)]
struct Scored {
    score: f64,
    choice: ControlChoice,
}

impl Scored {
    /// Higher score, then smaller |a|, smaller |ω|, then positive ω.
    fn better_than(&self, o: &Scored) -> bool {
        if self.score != o.score {
            return self.score > o.score;
        }
        let (a, b) = (self.choice.a_r.abs(), o.choice.a_r.abs());
        if a != b {
            return a < b;
        }
        let (wa, wb) = (1.0 / self.choice.r_c, 1.0 / o.choice.r_c);
        if wa.abs() != wb.abs() {
            return wa.abs() < wb.abs();
        }
        wa > wb
    }
}

impl Controller {
    pub fn new(mode: SafetyMode, refinements: Refinements, params: WorldParams) -> Self {
        Controller {
            mode,
            refinements,
            params,
            candidates: CandidateSet::default_for(&params),
            margin: 1.0,
            goal: None,
        }
    }

    pub fn with_goal(mut self, goal: Option<Vec2>) -> Self {
        self.goal = goal;
        self
    }

    pub fn with_margin(mut self, kappa: f64) -> Self {
        self.margin = kappa;
        self
    }

    fn has(&self, r: Refinement) -> bool {
        self.refinements.contains(r)
    }

    /// Distance gained toward the goal, less any speed that could not be
    /// shed before reaching it; distance travelled without a goal.
    fn progress(&self, p: Vec2, s: f64, v_end: f64) -> f64 {
        match self.goal {
            Some(g) => {
                let d = (p - g).norm_2();
                -d - (v_end - (2.0 * self.params.b * d).sqrt()).max(0.0)
            }
            None => s,
        }
    }

    /// Choose brake, stay, or the best admissible curve.
    pub fn decide(&self, obs: &Observation) -> ControlChoice {
        let r = &obs.robot;
        let best = self.best_curve(r, &obs.obstacles);
        let stay_score = self.progress(r.p_r, 0.0, 0.0);
        if let Some(b) = &best {
            if obs.stopped && b.score > stay_score {
                return b.choice.clone();
            }
            if !obs.stopped && b.score >= self.brake_score(r) {
                return b.choice.clone();
            }
        }
        if obs.stopped {
            if best.is_none() && self.has(Refinement::TrajectoryDistance) {
                let mut flipped = *r;
                flipped.d_r = -r.d_r;
                flipped.p_c = RobotState::implied_center(r.p_r, flipped.d_r, r.r_c);
                if let Some(b) = self.best_curve(&flipped, &obs.obstacles) {
                    return ControlChoice {
                        branch: Branch::Stay,
                        a_r: 0.0,
                        omega_r: 0.0,
                        r_c: b.choice.r_c,
                        p_c: b.choice.p_c,
                        d_flip: true,
                        visible: Vec::new(),
                    };
                }
            }
            return ControlChoice::stay(r);
        }
        ControlChoice::brake(r, &self.params)
    }

    fn brake_score(&self, r: &RobotState) -> f64 {
        let (_, _, s) = speed_profile(r.v_r, -self.params.b, self.params.eps);
        let (end, _, _) = arc_pose(r.p_r, r.d_r, r.r_c, s);
        self.progress(end, s, (r.v_r - self.params.b * self.params.eps).max(0.0))
    }

    fn query(&self, v: f64, a: f64) -> SafetyQuery {
        SafetyQuery::new(self.mode, self.refinements, self.params, v)
            .with_accel(a)
            .with_measured_speed(v)
            .with_margin(self.margin)
    }

    fn best_curve(&self, r: &RobotState, obstacles: &[ObstacleState]) -> Option<Scored> {
        let p = &self.params;
        let v = r.v_r;
        let v_hi = if self.has(Refinement::VelocityUncertainty) { v + p.delta_v } else { v };
        let fixed = [p.a_max];
        let accs: &[f64] = if self.has(Refinement::ActualAccel) {
            &self.candidates.accelerations
        } else {
            &fixed
        };
        // Orientation and trajectory checks depend on the curve; the plain
        // distance test only on the acceleration.
        let per_curve = self.mode == SafetyMode::PassiveOrientation
            || self.has(Refinement::TrajectoryDistance);
        let mut best: Option<Scored> = None;
        for &a in accs {
            let base = self.query(v, a);
            if !per_curve && !self.distance_safe(r, obstacles, &base) {
                continue;
            }
            let v_ref = v_hi.max(v_hi + a * p.eps);
            if v_ref <= 0.0 {
                continue;
            }
            let (_, _, s) = speed_profile(v, a, p.eps);
            for &w in &self.candidates.omegas {
                let r_c = if w == 0.0 {
                    STRAIGHT_RADIUS
                } else {
                    (v_ref / w.abs()).clamp(MIN_RADIUS, STRAIGHT_RADIUS) * w.signum()
                };
                let mut cand = *r;
                cand.r_c = r_c;
                cand.omega_r = v / r_c;
                cand.p_c = RobotState::implied_center(r.p_r, r.d_r, r_c);
                if per_curve
                    && !obstacles.iter().all(|o| {
                        is_safe_curve(
                            &cand,
                            o,
                            &base.with_obstacle_bound(obstacle_bound(o, self.refinements, p)),
                        )
                    })
                {
                    continue;
                }
                let (end, _, _) = arc_pose(r.p_r, r.d_r, r_c, s);
                let scored = Scored {
                    score: self.progress(end, s, (v + a * p.eps).max(0.0)),
                    choice: ControlChoice {
                        branch: Branch::Accelerate,
                        a_r: a,
                        omega_r: cand.omega_r,
                        r_c,
                        p_c: cand.p_c,
                        d_flip: false,
                        visible: Vec::new(),
                    },
                };
                if best.as_ref().is_none_or(|b| scored.better_than(b)) {
                    best = Some(scored);
                }
            }
        }
        if let Some(b) = best.as_mut() {
            if self.mode == SafetyMode::PassiveOrientation {
                b.choice.visible = obstacles
                    .iter()
                    .map(|o| visibility(r, o.p_o, p.gamma))
                    .collect();
            }
        }
        best
    }

    fn distance_safe(&self, r: &RobotState, obstacles: &[ObstacleState], q: &SafetyQuery) -> bool {
        let mut cached: Option<(f64, f64)> = None;
        obstacles.iter().all(|o| {
            let vb = obstacle_bound(o, self.refinements, &self.params);
            let sd = match cached {
                Some((b, sd)) if b == vb => sd,
                _ => match safe_distance(&q.with_obstacle_bound(vb)) {
                    Ok(sd) => {
                        cached = Some((vb, sd));
                        sd
                    }
                    Err(_) => return false,
                },
            };
            norm_inf(r.p_r - o.p_o) > q.margin * sd
        })
    }
}

/// One-shot decision with the verified controller and no goal.
pub fn decide(
    mode: SafetyMode,
    refinements: Refinements,
    observed: &Observation,
    params: &WorldParams,
    candidates: &CandidateSet,
) -> ControlChoice {
    let mut c = Controller::new(mode, refinements, *params);
    c.candidates = candidates.clone();
    c.decide(observed)
}
