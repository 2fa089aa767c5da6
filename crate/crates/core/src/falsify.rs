//! Randomized adversarial search for safety violations, and margin mutants
//! that weaken a controller on purpose.
//!
//! Trials perturb the template's obstacle placement and the episode seed.
//! Most of the budget is spent on independent random trials (run in
//! parallel, in index order); the rest on a (1+1) hill climb that moves the
//! obstacles of the closest call so far.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::harness::{run_with, with_pool, RunOptions, Violation};
use crate::safety::{eta_obs, safe_distance, SafetyQuery};
use crate::scenario::{validate_scenario, Scenario};
use crate::state::{Refinements, SafetyMode, WorldParams};
use crate::trace::Trace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Share of the budget spent on independent random trials.
pub const RANDOM_SHARE: f64 = 0.75;
/// Step size of the hill climb on obstacle positions (m).
pub const CLIMB_SIGMA: f64 = 1.0;
/// Random trials evaluated per parallel batch.
const CHUNK: usize = 64;
/// Radius around the robot in which obstacles are placed (m).
const PLACEMENT_RADIUS: f64 = 8.0;

/// A controller whose acceleration guard is scaled by `kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginMutation {
    pub mode: SafetyMode,
    pub kappa: f64,
}

/// Scale the controller's safety thresholds by `kappa ∈ (0, 1]`. Violations
/// are still judged against the unscaled property.
pub fn mutate_margin(mode: SafetyMode, kappa: f64) -> Result<MarginMutation> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Precondition(format!("kappa = {kappa} must be in (0, 1]")));
    }
    Ok(MarginMutation { mode, kappa })
}

impl MarginMutation {
    /// Distance the mutated guard requires at speed `v`.
    pub fn threshold(&self, v: f64, params: &WorldParams) -> Result<f64> {
        Ok(self.kappa * safe_distance(&SafetyQuery::new(self.mode, Refinements::empty(), *params, v))?)
    }

    /// The template with this mutation applied.
    pub fn apply(&self, template: &Scenario) -> Scenario {
        Scenario { mode: self.mode, kappa: self.kappa, ..template.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FalsifyConfig {
    pub budget: usize,
    pub seed: u64,
    /// Stop the search at the first violation.
    pub stop_at_first: bool,
}

impl FalsifyConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        FalsifyConfig { budget, seed, stop_at_first: true }
    }
}

#[derive(Debug, Clone)]
pub struct FalsificationResult {
    pub found: bool,
    /// Index of the violating trial.
    pub trial: Option<usize>,
    /// The violating scenario; replaying it reproduces the violation.
    pub scenario: Option<Scenario>,
    pub counterexample: Option<Trace>,
    pub violation: Option<Violation>,
    pub trials: usize,
    /// Trials that violated the property (all of them unless stopping at
    /// the first).
    pub violating_trials: usize,
    /// Smallest distance while moving over all trials.
    pub best_objective: f64,
    pub near_misses: usize,
}

/// Outcome of one trial.
#[derive(Debug, Clone)]
struct Trial {
    objective: f64,
    violation: Option<Violation>,
    near_misses: usize,
}

fn evaluate(s: &Scenario) -> Trial {
    let opts = RunOptions { record: false, monitor: None, stop_at_violation: true };
    match run_with(s, opts) {
        Ok(ep) => Trial {
            objective: ep.min_distance_moving,
            violation: ep.violations.first().copied(),
            near_misses: ep.near_misses,
        },
        // Placements that fail validation are skipped by construction; treat
        // anything else as uninformative.
        Err(_) => Trial { objective: f64::INFINITY, violation: None, near_misses: 0 },
    }
}

fn placement_ok(s: &Scenario) -> bool {
    if s.mode == SafetyMode::PassiveFriendly
        && s.obstacles.iter().any(|o| !eta_obs((s.robot.p_r - o.p_o).norm_2(), &s.params))
    {
        return false;
    }
    validate_scenario(s).is_empty()
}

/// Template with obstacles and episode seed redrawn by `rng`.
fn random_trial(template: &Scenario, rng: &mut ChaCha8Rng) -> Scenario {
    let mut s = template.clone();
    s.seed = rng.random();
    for _ in 0..100 {
        for o in s.obstacles.iter_mut() {
            let ahead = s.robot.d_r.rotate(rng.random_range(-PI / 2.0..PI / 2.0));
            o.p_o = s.robot.p_r + ahead * rng.random_range(0.5..PLACEMENT_RADIUS);
        }
        if placement_ok(&s) {
            return s;
        }
    }
    Scenario { seed: s.seed, ..template.clone() }
}

fn climb_step(best: &Scenario, rng: &mut ChaCha8Rng) -> Scenario {
    let normal = Normal::new(0.0, CLIMB_SIGMA).expect("positive sigma");
    let mut s = best.clone();
    s.seed = rng.random();
    for _ in 0..100 {
        for (o, b) in s.obstacles.iter_mut().zip(&best.obstacles) {
            o.p_o = b.p_o + Vec2::new(normal.sample(rng), normal.sample(rng));
        }
        if placement_ok(&s) {
            return s;
        }
    }
    Scenario { seed: s.seed, ..best.clone() }
}

fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Search for a violation of the template's safety property within
/// `config.budget` episodes.
pub fn falsify(template: &Scenario, config: FalsifyConfig) -> Result<FalsificationResult> {
    let bad = validate_scenario(template);
    if !bad.is_empty() {
        return Err(Error::InvalidScenario(bad));
    }
    let budget = config.budget;
    let n_random = ((budget as f64 * RANDOM_SHARE).ceil() as usize).min(budget).max(budget.min(1));
    let mut res = FalsificationResult {
        found: false,
        trial: None,
        scenario: None,
        counterexample: None,
        violation: None,
        trials: 0,
        violating_trials: 0,
        best_objective: f64::INFINITY,
        near_misses: 0,
    };
    let mut best: Option<(f64, Scenario)> = None;
    let record = |res: &mut FalsificationResult, idx: usize, s: &Scenario, t: &Trial| {
        res.trials = res.trials.max(idx + 1);
        res.near_misses += t.near_misses;
        res.best_objective = res.best_objective.min(t.objective);
        if let Some(v) = t.violation {
            res.violating_trials += 1;
            if !res.found {
                res.found = true;
                res.trial = Some(idx);
                res.scenario = Some(s.clone());
                res.violation = Some(v);
            }
        }
    };

    let mut start = 0;
    while start < n_random && !(res.found && config.stop_at_first) {
        let end = (start + CHUNK).min(n_random);
        let batch: Vec<(Scenario, Trial)> = with_pool(|| {
            (start..end)
                .into_par_iter()
                .map(|i| {
                    let s = random_trial(template, &mut trial_rng(config.seed, i));
                    let t = evaluate(&s);
                    (s, t)
                })
                .collect()
        });
        for (k, (s, t)) in batch.into_iter().enumerate() {
            if best.as_ref().is_none_or(|(b, _)| t.objective < *b) {
                best = Some((t.objective, s.clone()));
            }
            record(&mut res, start + k, &s, &t);
            if res.found && config.stop_at_first {
                break;
            }
        }
        start = end;
    }

    let mut rng = trial_rng(config.seed, usize::MAX);
    for idx in n_random..budget {
        if res.found && config.stop_at_first {
            break;
        }
        let Some((b, parent)) = best.clone() else { break };
        let s = climb_step(&parent, &mut rng);
        let t = evaluate(&s);
        if t.objective < b {
            best = Some((t.objective, s.clone()));
        }
        record(&mut res, idx, &s, &t);
    }

    if let Some(s) = &res.scenario {
        let ep = run_with(s, RunOptions { record: true, monitor: None, stop_at_violation: true })?;
        res.counterexample = Some(ep.trace);
    }
    Ok(res)
}

/// Metadata written next to a counterexample trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleMeta {
    pub falsify_seed: u64,
    pub trial: usize,
    pub episode_seed: u64,
    pub mode: SafetyMode,
    pub kappa: f64,
    pub objective: f64,
    pub violation: Violation,
    pub scenario: Scenario,
}

/// Write the counterexample trace to `csv` and its metadata to the same
/// path with a `.json` extension. Returns the metadata path.
pub fn write_counterexample(res: &FalsificationResult, falsify_seed: u64, csv: &Path) -> Result<Option<PathBuf>> {
    let (Some(trace), Some(s), Some(v), Some(trial)) = (&res.counterexample, &res.scenario, res.violation, res.trial)
    else {
        return Ok(None);
    };
    trace.write_csv_path(csv)?;
    let meta = CounterexampleMeta {
        falsify_seed,
        trial,
        episode_seed: s.seed,
        mode: s.mode,
        kappa: s.kappa,
        objective: v.distance,
        violation: v,
        scenario: s.clone(),
    };
    let path = csv.with_extension("json");
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    std::fs::write(&path, text)?;
    Ok(Some(path))
}
