use clap::{Args, Parser, Subcommand};
use dwsafe::falsify::{falsify, mutate_margin, write_counterexample, FalsifyConfig};
use dwsafe::harness::{run, Episode};
use dwsafe::liveness::{
    liveness_grid, run_intersection, run_liveness_cases, run_waypoint, sample_liveness_cases, CrossingState,
    LineState, LivenessKind,
};
use dwsafe::monitor::{check_trace, MonitorMode};
use dwsafe::scenario::{validate_scenario, Goal, Scenario};
use dwsafe::state::{Refinement, Refinements, SafetyMode, WorldParams};
use dwsafe::tables::{custom_table, reference_tables};
use dwsafe::trace::Trace;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dwsafe", version, about = "Provably-safe dynamic-window obstacle avoidance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Scenario TOML file.
    #[arg(long)]
    scenario: PathBuf,
    /// Episode seed (overrides the file).
    #[arg(long)]
    seed: Option<u64>,
    /// Parameter override, e.g. `--set A=2` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Safety mode (overrides the file).
    #[arg(long)]
    mode: Option<SafetyMode>,
    /// Refinement to enable (repeatable; replaces the file's list).
    #[arg(long = "refine")]
    refine: Vec<Refinement>,
    /// Controller margin factor in (0, 1].
    #[arg(long)]
    kappa: Option<f64>,
}

impl ScenarioArgs {
    fn load(&self) -> dwsafe::Result<Scenario> {
        let mut s = Scenario::from_toml_path(&self.scenario)?;
        s.params.apply_overrides(&self.overrides)?;
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(mode) = self.mode {
            s.mode = mode;
        }
        if !self.refine.is_empty() {
            s.refinements = Refinements::of(&self.refine);
        }
        if let Some(k) = self.kappa {
            s.kappa = mutate_margin(s.mode, k)?.kappa;
        }
        Ok(s)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, write its trace and print a summary.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Trace CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print minimum-distance and maximum-velocity tables.
    Tables {
        #[arg(long, default_value = "static")]
        mode: SafetyMode,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Speed for a custom minimum-distance row (repeatable).
        #[arg(long = "speed")]
        speeds: Vec<f64>,
        /// Distance for a custom maximum-velocity row (repeatable).
        #[arg(long = "distance")]
        distances: Vec<f64>,
    },
    /// Check a trace CSV against the controller monitor.
    CheckTrace {
        trace: PathBuf,
        /// Scenario whose parameters apply (defaults otherwise).
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Decide the exit status by the strict monitor.
        #[arg(long)]
        strict_monitor: bool,
    },
    /// Search for a safety violation.
    Falsify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Counterexample CSV output (metadata goes next to it as JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a liveness grid.
    Liveness {
        kind: LivenessKind,
        /// Number of grid points.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep sampled points that violate the feasibility condition and
        /// report them as skipped.
        #[arg(long)]
        include_infeasible: bool,
        /// JSON report output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a scenario file.
    Validate {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
}

const OK: u8 = 0;
const VIOLATION: u8 = 1;
const USAGE: u8 = 2;

fn fail(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(USAGE)
}

fn print_episode(s: &Scenario, ep: &Episode) {
    println!("mode: {} refinements: {} policy: {} seed: {}", s.mode, s.refinements, s.policy, s.seed);
    println!("steps: {}", ep.steps);
    println!("min distance while moving: {:.6}", ep.min_distance_moving);
    println!("near misses: {}", ep.near_misses);
    println!("stops: {}", ep.stops);
    println!("safety violations: {}", ep.violations.len());
    if let Some(v) = ep.violations.first() {
        println!("first violation: step {} t={:.4} obstacle {} {:?} distance {:.3e}", v.step, v.time, v.obstacle, v.kind, v.distance);
    }
    println!("loop invariant failures: {}", ep.invariant_failures.len());
    println!("differential invariant failures: {}", ep.diff_failures.len());
    if let Some(d) = ep.goal_distance {
        println!("final distance to goal: {d:.4}");
    }
}

fn simulate(args: &ScenarioArgs, out: Option<&PathBuf>) -> ExitCode {
    let s = match args.load() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let bad = validate_scenario(&s);
    if !bad.is_empty() {
        return fail(format!("invalid scenario: {}", bad.join("; ")));
    }
    match s.goal {
        Some(Goal::Waypoint(g)) => {
            let start = LineState { p: 0.0, v: s.robot.v_r };
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let rng = (!s.deterministic).then_some(&mut rng);
            let o = run_waypoint(start, &g, &s.params, rng, s.horizon);
            println!("task: waypoint p_g={} deadline={:?}", g.p_g, g.deadline);
            println!("entered goal region: {}", o.entered);
            println!("stopped inside goal region = {}", o.stopped_inside);
            if let Some(m) = o.deadline_met {
                println!("deadline met = {m}");
            }
            println!("time: {:.4}", o.time);
            ExitCode::from(if o.success() { OK } else { VIOLATION })
        }
        Some(Goal::Intersection(g)) => {
            let o0 = &s.obstacles[0];
            let start = CrossingState {
                robot: LineState { p: s.robot.p_r.x, v: s.robot.v_r },
                obstacle: LineState { p: o0.p_o.y, v: o0.v_o.y },
            };
            let o = run_intersection(start, &g, &s.params, s.seed, s.horizon);
            println!("task: intersection at ({}, {}) deadline={:?}", g.p_x.x, g.p_x.y, g.deadline);
            println!("passed intersection: {}", o.passed);
            if let Some(m) = o.deadline_met {
                println!("passed before deadline = {m}");
            }
            println!("collision while moving: {}", o.collision_while_moving);
            println!("min distance while moving: {:.6}", o.min_distance_moving);
            ExitCode::from(if o.success() { OK } else { VIOLATION })
        }
        _ => {
            let ep = match run(&s) {
                Ok(ep) => ep,
                Err(e) => return fail(e),
            };
            if let Some(path) = out {
                if let Err(e) = ep.trace.write_csv_path(path) {
                    return fail(e);
                }
                println!("trace: {}", path.display());
            }
            print_episode(&s, &ep);
            ExitCode::from(if ep.safe() { OK } else { VIOLATION })
        }
    }
}

fn tables(mode: SafetyMode, overrides: &[String], speeds: &[f64], distances: &[f64]) -> ExitCode {
    let tables = match reference_tables() {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    for t in &tables {
        println!("{t}");
    }
    if !speeds.is_empty() || !distances.is_empty() {
        let mut p = WorldParams::default();
        if let Err(e) = p.apply_overrides(overrides) {
            return fail(e);
        }
        match custom_table(mode, &p, speeds, distances) {
            Ok(t) => println!("{t}"),
            Err(e) => return fail(e),
        }
    }
    ExitCode::from(OK)
}

fn check(path: &Path, scenario: Option<&PathBuf>, overrides: &[String], strict: bool) -> ExitCode {
    let mut params = match scenario {
        Some(p) => match Scenario::from_toml_path(p) {
            Ok(s) => s.params,
            Err(e) => return fail(e),
        },
        None => WorldParams::default(),
    };
    if let Err(e) = params.apply_overrides(overrides) {
        return fail(e);
    }
    let trace = match Trace::read_csv_path(path, &params) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let strict_rep = check_trace(&trace, &params, MonitorMode::Strict);
    let relaxed_rep = check_trace(&trace, &params, MonitorMode::Relaxed);
    println!("{strict_rep}");
    println!("{relaxed_rep}");
    let decisive = if strict { &strict_rep } else { &relaxed_rep };
    ExitCode::from(if decisive.pass() { OK } else { VIOLATION })
}

fn run_falsify(args: &ScenarioArgs, budget: usize, out: Option<&PathBuf>) -> ExitCode {
    let s = match args.load() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let seed = args.seed.unwrap_or(s.seed);
    let res = match falsify(&s, FalsifyConfig::new(budget, seed)) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    println!("mode: {} refinements: {} policy: {} kappa: {}", s.mode, s.refinements, s.policy, s.kappa);
    println!("found: {}", res.found);
    println!("trials: {}", res.trials);
    println!("best objective (min distance while moving): {:.6e}", res.best_objective);
    println!("near misses: {}", res.near_misses);
    if let (Some(t), Some(v)) = (res.trial, res.violation) {
        println!("counterexample: trial {t}, step {}, t={:.4}, {:?}", v.step, v.time, v.kind);
    }
    if let Some(path) = out {
        match write_counterexample(&res, seed, path) {
            Ok(Some(meta)) => println!("written: {} and {}", path.display(), meta.display()),
            Ok(None) => {}
            Err(e) => return fail(e),
        }
    }
    ExitCode::from(if res.found { VIOLATION } else { OK })
}

fn liveness(kind: LivenessKind, n: usize, seed: u64, include_infeasible: bool, out: Option<&PathBuf>) -> ExitCode {
    let cases = if include_infeasible { sample_liveness_cases(kind, n, seed) } else { liveness_grid(kind, n, seed) };
    let rep = run_liveness_cases(kind, &cases);
    println!("{rep}");
    if let Some(path) = out {
        let text = match serde_json::to_string_pretty(&rep) {
            Ok(t) => t,
            Err(e) => return fail(e),
        };
        if let Err(e) = std::fs::write(path, text) {
            return fail(e);
        }
    }
    ExitCode::from(if rep.failed_cases.is_empty() { OK } else { VIOLATION })
}

fn validate(args: &ScenarioArgs) -> ExitCode {
    let s = match args.load() {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let bad = validate_scenario(&s);
    if bad.is_empty() {
        println!("valid");
        ExitCode::from(OK)
    } else {
        for b in &bad {
            println!("{b}");
        }
        ExitCode::from(USAGE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Simulate { scenario, out } => simulate(scenario, out.as_ref()),
        Command::Tables { mode, overrides, speeds, distances } => tables(*mode, overrides, speeds, distances),
        Command::CheckTrace { trace, scenario, overrides, strict_monitor } => {
            check(trace, scenario.as_ref(), overrides, *strict_monitor)
        }
        Command::Falsify { scenario, budget, out } => run_falsify(scenario, *budget, out.as_ref()),
        Command::Liveness { kind, n, seed, include_infeasible, out } => {
            liveness(*kind, *n, *seed, *include_infeasible, out.as_ref())
        }
        Command::Validate { scenario } => validate(scenario),
    }
}
