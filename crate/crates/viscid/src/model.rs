//! Model state and closed-form propagation under constant control.
//!
//! The motion model is a point mass in a viscous medium steered by a force of
//! bounded magnitude: `dr/dt = v`, `dv/dt = u - v` with `‖u‖ ≤ 1`. All
//! quantities are dimensionless; a physical model with arbitrary viscosity and
//! force bound must be pre-scaled in time and space so both constants become 1
//! before using this crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the control-norm bound; unit vectors produced by
/// normalization carry rounding error.
pub const CONTROL_NORM_TOL: f64 = 1e-9;

/// A vector in R^n with the standard inner product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// `[v0, 0, ..., 0]`, the conventional initial velocity.
    pub fn along_first_axis(v0: f64, n: usize) -> Self {
        let mut c = vec![0.0; n];
        c[0] = v0;
        Vector(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector(self.0.iter().map(|a| c * a).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    /// Unit vector in the direction of `self`; `None` for the zero vector.
    pub fn unit(&self) -> Option<Vector> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }
}

/// Position and velocity of the point mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub r: Vector,
    pub v: Vector,
}

impl State {
    /// The initial state `r = 0`, `v = [v0, 0, ..., 0]`.
    pub fn initial(v0: f64, n: usize) -> Self {
        State {
            r: Vector::zeros(n),
            v: Vector::along_first_axis(v0, n),
        }
    }
}

/// Scenario-level model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Position-space dimension, n ≥ 1.
    pub n: usize,
    /// Initial speed, in [0, 1); the initial velocity is `[v0, 0, ..., 0]`.
    pub v0: f64,
    /// Capture radius ℓ ≥ 0.
    pub ell: f64,
    /// Lipschitz constant of the target trajectory.
    pub lip: f64,
    /// Bound on the interception-component speed: 1 for position
    /// interception, 2 for velocity reaching.
    pub vmax: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidScenario("dimension n must be ≥ 1".into()));
        }
        if !(0.0..1.0).contains(&self.v0) {
            return Err(Error::InvalidScenario(format!(
                "initial speed v0 = {} must lie in [0, 1)",
                self.v0
            )));
        }
        if self.ell < 0.0 || !self.ell.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "capture radius ell = {} must be finite and ≥ 0",
                self.ell
            )));
        }
        if self.lip < 0.0 || !self.lip.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "Lipschitz constant lip = {} must be finite and ≥ 0",
                self.lip
            )));
        }
        if self.vmax <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "vmax = {} must be > 0",
                self.vmax
            )));
        }
        Ok(())
    }

    /// Initial velocity vector `[v0, 0, ..., 0]`.
    pub fn v0_vec(&self) -> Vector {
        Vector::along_first_axis(self.v0, self.n)
    }
}

/// Propagates the state over `dt` under a constant control `u`.
///
/// Closed form of the linear dynamics:
/// `v' = v e^{-dt} + u (1 - e^{-dt})`,
/// `r' = r + v (1 - e^{-dt}) + u (dt - 1 + e^{-dt})`.
pub fn propagate_const(state: &State, u: &Vector, dt: f64) -> Result<State> {
    let un = u.norm();
    if un > 1.0 + CONTROL_NORM_TOL {
        return Err(Error::ControlTooLarge { norm: un });
    }
    if dt < 0.0 || dt.is_nan() {
        return Err(Error::NegativeTimeStep { dt });
    }
    if u.dim() != state.v.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.v.dim(),
            got: u.dim(),
        });
    }
    let decay = (-dt).exp();
    // 1 - e^{-dt} via expm1 for small dt
    let growth = -(-dt).exp_m1();
    let drift = dt - growth; // dt - 1 + e^{-dt} ≥ 0
    let v = state.v.scale(decay).axpy(growth, u);
    let r = state.r.axpy(growth, &state.v).axpy(drift, u);
    Ok(State { r, v })
}

/// Householder reflection that swaps `unit(v)` with the first basis vector.
///
/// The reflection is its own inverse, so the same matrix maps aligned-frame
/// outputs back to the world frame. Returns `None` for the zero vector and
/// the identity (represented as `None` as well) when `v` is already along
/// the first axis.
#[derive(Debug, Clone)]
pub struct AxisAlignment {
    /// Reflection axis w with ‖w‖ = 1, or None for identity.
    w: Option<Vector>,
}

impl AxisAlignment {
    /// Builds the reflection taking `v` to `‖v‖ e₁`.
    pub fn to_first_axis(v: &Vector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::InvalidScenario(
                "cannot align the zero vector to an axis".into(),
            ));
        }
        let e1 = Vector::along_first_axis(n, v.dim());
        let diff = v.sub(&e1);
        match diff.unit() {
            // v already along e1 (or numerically indistinguishable)
            None => Ok(AxisAlignment { w: None }),
            Some(w) if diff.norm() < 1e-15 * n => {
                let _ = w;
                Ok(AxisAlignment { w: None })
            }
            Some(w) => Ok(AxisAlignment { w: Some(w) }),
        }
    }

    /// Applies the reflection: `x - 2 (w, x) w`.
    pub fn apply(&self, x: &Vector) -> Vector {
        match &self.w {
            None => x.clone(),
            Some(w) => {
                let d = w.dot(x).expect("dimension checked at construction");
                x.axpy(-2.0 * d, w)
            }
        }
    }
}
