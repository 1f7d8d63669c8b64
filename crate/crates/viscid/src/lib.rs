//! Reachable sets and minimum-time target interception for a point mass in
//! a viscous medium (`dr/dt = v`, `dv/dt = u - v`, `‖u‖ ≤ 1`).
//!
//! The crate provides:
//! - closed-form propagation of the dynamics under constant control
//!   ([`model`]);
//! - real branches of the Lambert W function ([`lambert`]);
//! - extremal trajectories and reachable-set boundary sampling
//!   ([`extremal`]);
//! - ball descriptions of the position/velocity projections and their
//!   distance functions ([`reach`]);
//! - always-convergent fixed-point interception solvers with optional
//!   Newton polish and forward verification ([`solver`]);
//! - target trajectories, built-in and file-based ([`targets`]);
//! - a scenario-runner CLI ([`cli`], `viscid` binary).
//!
//! All quantities are dimensionless: physical models with arbitrary
//! viscosity and force bound must be rescaled in time and space so both
//! constants become 1 before use.

pub mod cli;
pub mod error;
pub mod extremal;
pub mod lambert;
pub mod model;
pub mod reach;
pub mod solver;
pub mod targets;

pub use error::{Error, Result};
pub use model::{propagate_const, ModelParams, State, Vector};
pub use solver::{solve_intercept, EstimatorKind, InterceptSolution};
pub use targets::{Problem, Scenario, Trajectory};
