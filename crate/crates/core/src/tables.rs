//! Minimum safe distance and maximum velocity tables for reference robot
//! configurations, compared against their published two-decimal values.

use crate::error::Result;
use crate::safety::{max_velocity, safe_distance, SafetyQuery};
use crate::state::{Refinements, SafetyMode, WorldParams};
use std::fmt::{self, Write as _};

/// Published values are compared after rounding to two decimals, allowing
/// one unit in the last place.
pub const TABLE_TOL: f64 = 0.01;

/// Corridor half-width used by the maximum-velocity tables (m).
pub const CORRIDOR: f64 = 1.25;
/// Door half-width used by the maximum-velocity tables (m).
pub const DOOR: f64 = 0.25;

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Whether a computed value agrees with a published two-decimal value.
pub fn matches_published(computed: f64, published: f64) -> bool {
    (round2(computed) - published).abs() <= TABLE_TOL + 1e-9
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    MinDistance,
    MaxVelocity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub params: WorldParams,
    /// Robot speed for distance rows.
    pub v_r: Option<f64>,
    /// Obstacle distance for velocity rows.
    pub distance: Option<f64>,
    pub computed: f64,
    pub published: Option<f64>,
}

impl TableRow {
    pub fn rounded(&self) -> f64 {
        round2(self.computed)
    }

    /// `None` for rows without a published value.
    pub fn agrees(&self) -> Option<bool> {
        self.published.map(|p| matches_published(self.computed, p))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub mode: SafetyMode,
    pub kind: TableKind,
    pub rows: Vec<TableRow>,
}

/// One reference configuration: (v, A, b, V, ε).
type Config = (f64, f64, f64, f64, f64);

const STATIC_CONFIGS: [Config; 5] = [
    (1.0, 1.0, 1.0, 0.0, 0.05),
    (0.5, 0.5, 0.5, 0.0, 0.025),
    (2.0, 2.0, 2.0, 0.0, 0.1),
    (1.0, 1.0, 2.0, 0.0, 0.05),
    (1.0, 2.0, 1.0, 0.0, 0.05),
];
const STATIC_MIN_DISTANCE: [f64; 5] = [0.61, 0.28, 1.42, 0.33, 0.66];
const STATIC_CORRIDOR: [f64; 5] = [1.48, 1.09, 1.85, 2.08, 1.43];
const STATIC_DOOR: [f64; 5] = [0.61, 0.47, 0.63, 0.85, 0.56];

const PASSIVE_CONFIGS: [Config; 5] = [
    (1.0, 1.0, 1.0, 1.0, 0.05),
    (0.5, 0.5, 0.5, 0.5, 0.025),
    (2.0, 2.0, 2.0, 2.0, 0.1),
    (1.0, 1.0, 2.0, 1.0, 0.05),
    (1.0, 2.0, 1.0, 2.0, 0.05),
];
const PASSIVE_MIN_DISTANCE: [f64; 5] = [0.61, 0.28, 1.42, 0.33, 0.66];
const PASSIVE_CORRIDOR: [f64; 5] = [0.77, 0.69, 0.61, 0.4, 1.3];
const PASSIVE_DOOR: [f64; 5] = [0.12, 0.18, 0.0, 0.26, 1.0];

fn params_of(c: Config) -> WorldParams {
    WorldParams { a_max: c.1, b: c.2, v_obs: c.3, eps: c.4, ..WorldParams::default() }
}

/// Minimum safe distance at speed `v` under `mode`.
pub fn min_distance(mode: SafetyMode, v: f64, params: &WorldParams) -> Result<f64> {
    safe_distance(&SafetyQuery::new(mode, Refinements::empty(), *params, v))
}

fn label(c: Config, mode: SafetyMode) -> String {
    if mode == SafetyMode::Static {
        format!("A={} b={} eps={}", c.1, c.2, c.4)
    } else {
        format!("A={} b={} V={} eps={}", c.1, c.2, c.3, c.4)
    }
}

fn distance_table(title: &str, mode: SafetyMode, configs: &[Config], published: &[f64]) -> Result<Table> {
    let rows = configs
        .iter()
        .zip(published)
        .map(|(&c, &pubd)| {
            let params = params_of(c);
            Ok(TableRow {
                label: format!("v={} {}", c.0, label(c, mode)),
                params,
                v_r: Some(c.0),
                distance: None,
                computed: min_distance(mode, c.0, &params)?,
                published: Some(pubd),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Table { title: title.into(), mode, kind: TableKind::MinDistance, rows })
}

fn velocity_table(title: &str, mode: SafetyMode, configs: &[Config], corridor: &[f64], door: &[f64]) -> Table {
    let mut rows = Vec::new();
    for (name, dist, published) in [("corridor", CORRIDOR, corridor), ("door", DOOR, door)] {
        for (&c, &pubd) in configs.iter().zip(published) {
            let params = params_of(c);
            rows.push(TableRow {
                label: format!("{name} {}", label(c, mode)),
                params,
                v_r: None,
                distance: Some(dist),
                computed: max_velocity(mode, dist, &params),
                published: Some(pubd),
            });
        }
    }
    Table { title: title.into(), mode, kind: TableKind::MaxVelocity, rows }
}

pub fn static_min_distance_table() -> Result<Table> {
    distance_table("Static safety: minimum safe distance", SafetyMode::Static, &STATIC_CONFIGS, &STATIC_MIN_DISTANCE)
}

pub fn static_max_velocity_table() -> Table {
    velocity_table(
        "Static safety: maximum velocity through corridors and doors",
        SafetyMode::Static,
        &STATIC_CONFIGS,
        &STATIC_CORRIDOR,
        &STATIC_DOOR,
    )
}

/// The published passive minimum-distance column repeats the static one, so
/// most rows disagree with the formula.
pub fn passive_min_distance_table() -> Result<Table> {
    distance_table(
        "Passive safety: minimum safe distance",
        SafetyMode::Passive,
        &PASSIVE_CONFIGS,
        &PASSIVE_MIN_DISTANCE,
    )
}

pub fn passive_max_velocity_table() -> Table {
    velocity_table(
        "Passive safety: maximum velocity through corridors and doors",
        SafetyMode::Passive,
        &PASSIVE_CONFIGS,
        &PASSIVE_CORRIDOR,
        &PASSIVE_DOOR,
    )
}

/// All four reference tables.
pub fn reference_tables() -> Result<Vec<Table>> {
    Ok(vec![
        static_min_distance_table()?,
        static_max_velocity_table(),
        passive_min_distance_table()?,
        passive_max_velocity_table(),
    ])
}

/// A user-defined table: minimum distances for `speeds` and maximum
/// velocities for `distances` under one parameter set.
pub fn custom_table(mode: SafetyMode, params: &WorldParams, speeds: &[f64], distances: &[f64]) -> Result<Table> {
    let mut rows = Vec::new();
    for &v in speeds {
        rows.push(TableRow {
            label: format!("v={v}"),
            params: *params,
            v_r: Some(v),
            distance: None,
            computed: min_distance(mode, v, params)?,
            published: None,
        });
    }
    for &d in distances {
        rows.push(TableRow {
            label: format!("distance={d}"),
            params: *params,
            v_r: None,
            distance: Some(d),
            computed: max_velocity(mode, d, params),
            published: None,
        });
    }
    Ok(Table { title: format!("{mode}: custom configuration"), mode, kind: TableKind::MinDistance, rows })
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        writeln!(f, "  {:<32} {:>12} {:>8} {:>10}  status", "row", "value", "2 dp", "published")?;
        for r in &self.rows {
            let mut line = String::new();
            let _ = write!(line, "  {:<32} {:>12.6} {:>8.2}", r.label, r.computed, r.rounded());
            match (r.published, r.agrees()) {
                (Some(p), Some(true)) => {
                    let _ = write!(line, " {p:>10.2}  ok");
                }
                (Some(p), _) => {
                    let _ = write!(line, " {p:>10.2}  formula-inconsistent");
                }
                _ => {
                    let _ = write!(line, " {:>10}", "-");
                }
            }
            writeln!(f, "{}", line.trim_end())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_first_row() {
        let t = static_min_distance_table().unwrap();
        assert!((t.rows[0].computed - 0.6025).abs() < 1e-12);
        assert_eq!(t.rows[0].rounded(), 0.60);
        assert_eq!(t.rows[0].agrees(), Some(true));
    }

    #[test]
    fn static_tables_agree() {
        let all: Vec<TableRow> = static_min_distance_table()
            .unwrap()
            .rows
            .into_iter()
            .chain(static_max_velocity_table().rows)
            .collect();
        assert_eq!(all.len(), 15);
        assert!(all.iter().all(|r| r.agrees() == Some(true)), "{all:#?}");
    }

    #[test]
    fn passive_velocity_rows() {
        let t = passive_max_velocity_table();
        let ok: Vec<bool> = t.rows.iter().map(|r| r.agrees().unwrap()).collect();
        assert_eq!(ok, [true, true, true, false, false, true, true, true, true, false]);
        assert!((t.rows[2].computed - 0.6133).abs() < 1e-4);
    }

    #[test]
    fn passive_distance_formula_differs_from_published() {
        let t = passive_min_distance_table().unwrap();
        assert!((t.rows[0].computed - 1.7025).abs() < 1e-12);
        assert_eq!(t.rows[0].agrees(), Some(false));
    }

    #[test]
    fn rendering_has_both_precisions() {
        let text = static_min_distance_table().unwrap().to_string();
        assert!(text.contains("0.602500"));
        assert!(text.contains(" 0.60"));
        assert!(text.contains("0.61"));
    }

    #[test]
    fn custom_rows() {
        let t = custom_table(SafetyMode::Static, &WorldParams::default(), &[1.0], &[1.25]).unwrap();
        assert!((t.rows[0].computed - 0.6025).abs() < 1e-12);
        assert!((t.rows[1].computed - 1.4827).abs() < 1e-4);
    }
}
