//! Ball descriptions of the position- and velocity-space projections of the
//! reachable set, and distances to them.
//!
//! Both projections are Euclidean balls: at time `t` the position projection
//! has center `v0 (1 - e^{-t}) e₁` and radius `t - 1 + e^{-t}`; the velocity
//! projection has center `v0 e^{-t} e₁` and radius `1 - e^{-t}`.
//!
//! The model keeps the initial velocity along the first axis. Scenarios given
//! in a world frame should be rotated into this frame first (see
//! [`crate::model::AxisAlignment`]) and rotated back on output.

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, Vector};

/// Center/radius description of a reachable-set projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachBall {
    pub center: Vector,
    pub radius: f64,
}

impl ReachBall {
    /// `max(0, ‖h - center‖ - radius)`; exactly 0 inside the ball.
    pub fn distance(&self, h: &Vector) -> f64 {
        (h.sub(&self.center).norm() - self.radius).max(0.0)
    }
}

/// Position-space projection ball at time `t`.
pub fn reach_ball_position(t: f64, params: &ModelParams) -> ReachBall {
    let growth = -(-t).exp_m1(); // 1 - e^{-t}
    ReachBall {
        center: Vector::along_first_axis(params.v0 * growth, params.n),
        radius: t - growth,
    }
}

/// Velocity-space projection ball at time `t`.
pub fn reach_ball_velocity(t: f64, params: &ModelParams) -> ReachBall {
    ReachBall {
        center: Vector::along_first_axis(params.v0 * (-t).exp(), params.n),
        radius: -(-t).exp_m1(),
    }
}

/// Distance from `h` to the position projection of the reachable set.
pub fn dist_position(t: f64, h: &Vector, params: &ModelParams) -> f64 {
    reach_ball_position(t, params).distance(h)
}

/// Distance from `h` to the velocity projection of the reachable set.
pub fn dist_velocity(t: f64, h: &Vector, params: &ModelParams) -> f64 {
    reach_ball_velocity(t, params).distance(h)
}
