//! Sampled traces and their CSV form.
//!
//! Each control step is stored as two rows with the same step index: the
//! state sampled before the controller ran and the state right after it
//! chose (obstacle velocities included). Floats use 17 significant digits so
//! that a round trip is exact.

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::state::{ControlChoice, ObstacleState, RobotState, WorldParams};
use std::io::{Read, Write};
use std::path::Path;

/// World state at one sampling instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t_model: f64,
    pub robot: RobotState,
    pub obstacles: Vec<ObstacleState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub step: usize,
    pub pre: Sample,
    pub post: Sample,
    /// The controller's choice, when known (not stored in CSV).
    pub choice: Option<ControlChoice>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

const ROBOT_COLUMNS: [&str; 13] = [
    "step", "t_model", "pr_x", "pr_y", "vr", "ar", "drx", "dry", "wr", "rc", "pcx", "pcy", "beta",
];

fn obstacle_columns(i: usize) -> [String; 5] {
    [
        format!("po{i}_x"),
        format!("po{i}_y"),
        format!("vo{i}_x"),
        format!("vo{i}_y"),
        format!("visible_{i}"),
    ]
}

/// Header for a trace with `n` obstacles.
pub fn csv_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = ROBOT_COLUMNS.iter().map(|s| s.to_string()).collect();
    for i in 0..n {
        h.extend(obstacle_columns(i));
    }
    h
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn sample_row(step: usize, s: &Sample) -> Vec<String> {
    let r = &s.robot;
    let mut row = vec![step.to_string()];
    row.extend(
        [s.t_model, r.p_r.x, r.p_r.y, r.v_r, r.a_r, r.d_r.x, r.d_r.y, r.omega_r, r.r_c, r.p_c.x, r.p_c.y, r.beta]
            .map(fmt),
    );
    for o in &s.obstacles {
        row.extend([o.p_o.x, o.p_o.y, o.v_o.x, o.v_o.y, o.visible].map(fmt));
    }
    row
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn obstacle_count(&self) -> usize {
        self.steps.first().map_or(0, |s| s.pre.obstacles.len())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(csv_header(self.obstacle_count()))?;
        for s in &self.steps {
            out.write_record(sample_row(s.step, &s.pre))?;
            out.write_record(sample_row(s.step, &s.post))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    /// Parse a trace. Obstacle speed bounds are not stored and are set to
    /// `params.V`; the post-control clock `t` is 0 by construction.
    pub fn read_csv<R: Read>(r: R, params: &WorldParams) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        if header.len() < ROBOT_COLUMNS.len() || !(header.len() - ROBOT_COLUMNS.len()).is_multiple_of(5) {
            return Err(Error::MalformedTrace(format!("{} columns", header.len())));
        }
        let n = (header.len() - ROBOT_COLUMNS.len()) / 5;
        if header != csv_header(n) {
            return Err(Error::MalformedTrace("unexpected header".into()));
        }
        let mut rows = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            let step: usize = rec[0]
                .trim()
                .parse()
                .map_err(|_| Error::MalformedTrace(format!("row {}: bad step", line + 1)))?;
            let vals: Vec<f64> = rec
                .iter()
                .skip(1)
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MalformedTrace(format!("row {}: bad number", line + 1)))?;
            if vals.iter().any(|x| !x.is_finite()) {
                return Err(Error::MalformedTrace(format!("row {}: non-finite value", line + 1)));
            }
            rows.push((step, vals));
        }
        if rows.len() % 2 != 0 {
            return Err(Error::MalformedTrace("odd number of rows".into()));
        }
        let to_sample = |v: &[f64]| {
            let robot = RobotState {
                p_r: Vec2::new(v[1], v[2]),
                v_r: v[3],
                a_r: v[4],
                d_r: Vec2::new(v[5], v[6]),
                omega_r: v[7],
                r_c: v[8],
                p_c: Vec2::new(v[9], v[10]),
                beta: v[11],
                t: 0.0,
            };
            let obstacles = (0..n)
                .map(|i| {
                    let o = &v[12 + 5 * i..17 + 5 * i];
                    ObstacleState {
                        visible: o[4],
                        ..ObstacleState::new(Vec2::new(o[0], o[1]), Vec2::new(o[2], o[3]), params.v_obs)
                    }
                })
                .collect();
            Sample { t_model: v[0], robot, obstacles }
        };
        let mut steps = Vec::with_capacity(rows.len() / 2);
        let mut last_t = f64::NEG_INFINITY;
        for pair in rows.chunks(2) {
            let (s0, pre) = &pair[0];
            let (s1, post) = &pair[1];
            if s0 != s1 {
                return Err(Error::MalformedTrace(format!("step {s0} has no post-control row")));
            }
            let pre = to_sample(pre);
            let post = to_sample(post);
            if pre.t_model < last_t || post.t_model != pre.t_model {
                return Err(Error::MalformedTrace(format!("step {s0}: time not increasing")));
            }
            last_t = pre.t_model;
            steps.push(TraceStep { step: *s0, pre, post, choice: None });
        }
        Ok(Trace { steps })
    }

    pub fn read_csv_path(path: &Path, params: &WorldParams) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, params)
    }
}
