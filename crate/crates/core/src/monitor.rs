//! Controller monitor over sampled pre/post pairs. A pair passes when the
//! obstacle clause, the dynamics clause, and one of the brake, stay, or
//! accelerate branches hold. Failing clauses are reported by id with their
//! residual.

use crate::geom::norm_inf;
use crate::safety::{safe_distance, SafetyQuery};
use crate::state::{Branch, ControlChoice, Refinements, SafetyMode, WorldParams};
use crate::trace::{Sample, Trace};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Absolute tolerance of equality clauses.
pub const MONITOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonitorMode {
    /// Brake and stay also require unchanged obstacle positions.
    Strict,
    /// Obstacle positions are exempt from the unchanged clauses.
    Relaxed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonitorBranch {
    Brake,
    Stay,
    Accelerate,
}

impl MonitorBranch {
    pub fn id(self) -> &'static str {
        match self {
            MonitorBranch::Brake => "mon_b",
            MonitorBranch::Stay => "mon_s",
            MonitorBranch::Accelerate => "mon_a",
        }
    }
}

/// A failed clause and how far it is from holding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedClause {
    pub id: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorVerdict {
    pub pass: bool,
    pub satisfied_branch: Option<MonitorBranch>,
    /// On failure: failing `mon_o`/`mon_dyn` clauses, then the first failing
    /// clause of `mon_a`, `mon_b`, `mon_s`. Empty on pass.
    pub failed_clauses: Vec<FailedClause>,
}

impl MonitorVerdict {
    pub fn clause_ids(&self) -> Vec<&str> {
        self.failed_clauses.iter().map(|c| c.id.as_str()).collect()
    }
}

/// Clause list of one branch, evaluated in order.
struct Clauses {
    prefix: &'static str,
    items: Vec<(&'static str, f64)>,
}

impl Clauses {
    fn new(prefix: &'static str) -> Self {
        Clauses { prefix, items: Vec::new() }
    }

    /// Record a clause with residual `r` (≤ 0 means satisfied).
    fn push(&mut self, name: &'static str, r: f64) {
        self.items.push((name, if r.is_nan() { f64::INFINITY } else { r }));
    }

    fn eq(&mut self, name: &'static str, a: f64, b: f64) {
        self.push(name, (a - b).abs() - MONITOR_TOL);
    }

    fn first_failure(&self) -> Option<FailedClause> {
        self.items
            .iter()
            .find(|(_, r)| *r > 0.0)
            .map(|(n, r)| FailedClause { id: format!("{}.{}", self.prefix, n), residual: *r })
    }

    fn all_failures(&self) -> Vec<FailedClause> {
        self.items
            .iter()
            .filter(|(_, r)| *r > 0.0)
            .map(|(n, r)| FailedClause { id: format!("{}.{}", self.prefix, n), residual: *r })
            .collect()
    }
}

fn unchanged_common(c: &mut Clauses, pre: &Sample, post: &Sample, mode: MonitorMode) {
    if mode == MonitorMode::Strict {
        let d = pre
            .obstacles
            .iter()
            .zip(&post.obstacles)
            .map(|(a, b)| (a.p_o - b.p_o).norm_inf())
            .fold(0.0, f64::max);
        c.push("p_o", d - MONITOR_TOL);
    }
    let (r0, r1) = (&pre.robot, &post.robot);
    c.push("p_r", (r0.p_r - r1.p_r).norm_inf() - MONITOR_TOL);
    c.push("d_r", (r0.d_r - r1.d_r).norm_inf() - MONITOR_TOL);
    c.eq("v_r", r1.v_r, r0.v_r);
}

/// Evaluate the monitor on one pre/post pair.
pub fn eval_monitor(pre: &Sample, post: &Sample, params: &WorldParams, mode: MonitorMode) -> MonitorVerdict {
    let (r0, r1) = (&pre.robot, &post.robot);
    let (a_max, b) = (params.a_max, params.b);

    let mut mon_o = Clauses::new("mon_o");
    let vo = post.obstacles.iter().map(|o| o.v_o.norm_2()).fold(0.0, f64::max);
    mon_o.push("v_o", vo - params.v_obs - MONITOR_TOL);
    if pre.obstacles.len() != post.obstacles.len() {
        mon_o.push("count", f64::INFINITY);
    }

    let mut mon_dyn = Clauses::new("mon_dyn");
    mon_dyn.push("eps", -params.eps);
    mon_dyn.push("v_r", -r0.v_r);
    mon_dyn.push("t", r1.t.abs() - MONITOR_TOL);

    let mut mon_b = Clauses::new("mon_b");
    mon_b.eq("accel", r1.a_r, -b);
    unchanged_common(&mut mon_b, pre, post, mode);
    mon_b.eq("omega", r1.omega_r, r0.omega_r);
    mon_b.eq("r_c", r1.r_c, r0.r_c);

    let mut mon_s = Clauses::new("mon_s");
    mon_s.push("velocity", r0.v_r.abs() - MONITOR_TOL);
    mon_s.eq("accel", r1.a_r, 0.0);
    mon_s.eq("omega", r1.omega_r, 0.0);
    unchanged_common(&mut mon_s, pre, post, mode);
    mon_s.eq("r_c", r1.r_c, r0.r_c);

    let mut mon_a = Clauses::new("mon_a");
    mon_a.push("accel_range", (-b - r1.a_r).max(r1.a_r - a_max));
    mon_a.push("r_c_nonzero", if r1.r_c != 0.0 { -1.0 } else { 1.0 });
    mon_a.eq("curve", r1.omega_r * r1.r_c, r0.v_r);
    mon_a.push("p_r", (r0.p_r - r1.p_r).norm_inf() - MONITOR_TOL);
    mon_a.push("d_r", (r0.d_r - r1.d_r).norm_inf() - MONITOR_TOL);
    mon_a.eq("v_r", r1.v_r, r0.v_r);
    let q = SafetyQuery::new(SafetyMode::Passive, Refinements::empty(), *params, r0.v_r.max(0.0));
    let need = safe_distance(&q).unwrap_or(f64::INFINITY);
    let gap = post
        .obstacles
        .iter()
        .map(|o| norm_inf(r0.p_r - o.p_o))
        .fold(f64::INFINITY, f64::min);
    mon_a.push("safedist", if gap > need { -(gap - need) } else { need - gap + f64::MIN_POSITIVE });

    let common_ok = mon_o.first_failure().is_none() && mon_dyn.first_failure().is_none();
    let satisfied = [
        (MonitorBranch::Accelerate, &mon_a),
        (MonitorBranch::Brake, &mon_b),
        (MonitorBranch::Stay, &mon_s),
    ]
    .into_iter()
    .find(|(_, c)| c.first_failure().is_none())
    .map(|(b, _)| b);

    if common_ok && satisfied.is_some() {
        return MonitorVerdict { pass: true, satisfied_branch: satisfied, failed_clauses: Vec::new() };
    }
    let mut failed = mon_o.all_failures();
    failed.extend(mon_dyn.all_failures());
    if satisfied.is_none() {
        failed.extend([&mon_a, &mon_b, &mon_s].iter().filter_map(|c| c.first_failure()));
    }
    MonitorVerdict { pass: false, satisfied_branch: satisfied, failed_clauses: failed }
}

/// Per-step verdicts of a whole trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub mode: MonitorMode,
    pub verdicts: Vec<MonitorVerdict>,
    pub first_failure: Option<usize>,
}

impl ComplianceReport {
    pub fn pass(&self) -> bool {
        self.first_failure.is_none()
    }
}

impl fmt::Display for ComplianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failures = self.verdicts.iter().filter(|v| !v.pass).count();
        match self.first_failure {
            None => write!(f, "{:?}: compliant ({} steps)", self.mode, self.verdicts.len()),
            Some(i) => write!(
                f,
                "{:?}: violation at step {i} [{}] ({failures} of {} steps fail)",
                self.mode,
                self.verdicts[i].clause_ids().join(", "),
                self.verdicts.len()
            ),
        }
    }
}

pub fn check_trace(trace: &Trace, params: &WorldParams, mode: MonitorMode) -> ComplianceReport {
    let verdicts: Vec<MonitorVerdict> = trace
        .steps
        .iter()
        .map(|s| eval_monitor(&s.pre, &s.post, params, mode))
        .collect();
    let first_failure = verdicts.iter().position(|v| !v.pass);
    ComplianceReport { mode, verdicts, first_failure }
}

/// Fail-safe replacement: full braking on the previous curve.
pub fn fallback(last_safe: &ControlChoice, params: &WorldParams) -> ControlChoice {
    ControlChoice {
        branch: Branch::Brake,
        a_r: -params.b,
        omega_r: last_safe.omega_r,
        r_c: last_safe.r_c,
        p_c: last_safe.p_c,
        d_flip: false,
        visible: Vec::new(),
    }
}
