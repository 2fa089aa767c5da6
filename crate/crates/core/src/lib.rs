//! Dynamic-window obstacle avoidance with provable safety envelopes.
//!
//! The crate computes safe braking distances for a family of robot
//! controllers, integrates circular-arc motion in closed form, runs
//! adversarial episodes, monitors sampled traces for controller compliance,
//! and searches for counterexamples.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controllers;
pub mod dynamics;
pub mod error;
pub mod falsify;
pub mod geom;
pub mod harness;
pub mod liveness;
pub mod monitor;
pub mod safety;
pub mod scenario;
pub mod state;
pub mod tables;
pub mod trace;

pub use error::{Error, Result};
pub use geom::{norm_2, norm_inf, Vec2};
