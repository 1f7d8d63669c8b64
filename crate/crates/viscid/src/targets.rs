//! Target trajectories: Lipschitz-continuous functions of time with a
//! declared Lipschitz constant, including the built-in simulation examples
//! and piecewise-linear trajectories loaded from CSV.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Vector};

/// Which component space the interception happens in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Intercept a moving point in position space; component speed ≤ 1.
    Position,
    /// Reach a time-varying velocity; component speed ≤ 2.
    Velocity,
}

impl Problem {
    /// The model's bound on the interception-component speed.
    pub fn vmax(self) -> f64 {
        match self {
            Problem::Position => 1.0,
            Problem::Velocity => 2.0,
        }
    }
}

/// Piecewise-linear samples `(t_k, h_k)` with strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledData {
    pub times: Vec<f64>,
    pub points: Vec<Vector>,
}

/// A target trajectory `h_T ∈ Lip_v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryKind {
    /// `[1 + sin(3t)/6, (√2/4) sin(√2 t)]`, Lipschitz constant √2/2.
    Lissajous,
    /// `[-(8/15) sin(3t/2), -(8/15) cos(3t/2)]`, Lipschitz constant 4/5.
    RotatingVelocity,
    /// A stationary point; Lipschitz constant 0.
    ConstantPoint(Vector),
    /// Programmatic piecewise-linear waypoints.
    PiecewiseLinear(SampledData),
    /// Piecewise-linear samples loaded from a file.
    Sampled(SampledData),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    /// Declared Lipschitz constant of `eval`.
    pub lip: f64,
}

/// True Euclidean Lipschitz constant of the Lissajous example: its speed is
/// `(1/2) sqrt(cos² 3t + cos² √2 t)`, which peaks at `√2/2` at `t = 0`.
pub const LISSAJOUS_LIP: f64 = std::f64::consts::FRAC_1_SQRT_2;
pub const ROTATING_VELOCITY_LIP: f64 = 0.8;

/// The planar Lissajous example target.
pub fn lissajous(t: f64) -> Vector {
    Vector(vec![
        1.0 + (3.0 * t).sin() / 6.0,
        std::f64::consts::SQRT_2 / 4.0 * (std::f64::consts::SQRT_2 * t).sin(),
    ])
}

/// The rotating desired-velocity example target.
pub fn rotating_velocity(t: f64) -> Vector {
    let c = 8.0 / 15.0;
    Vector(vec![-c * (1.5 * t).sin(), -c * (1.5 * t).cos()])
}

impl Trajectory {
    pub fn lissajous() -> Self {
        Trajectory {
            kind: TrajectoryKind::Lissajous,
            lip: LISSAJOUS_LIP,
        }
    }

    pub fn rotating_velocity() -> Self {
        Trajectory {
            kind: TrajectoryKind::RotatingVelocity,
            lip: ROTATING_VELOCITY_LIP,
        }
    }

    pub fn constant(point: Vector) -> Self {
        Trajectory {
            kind: TrajectoryKind::ConstantPoint(point),
            lip: 0.0,
        }
    }

    /// Builds a piecewise-linear trajectory from `(t, h)` rows.
    ///
    /// Times must be strictly increasing and start at 0; every segment slope
    /// must respect `lip`. Beyond the last sample the final value is held,
    /// which keeps the trajectory defined on all of `t ≥ 0` with a
    /// 0-Lipschitz tail.
    pub fn piecewise_linear(rows: Vec<(f64, Vector)>, lip: f64) -> Result<Self> {
        let data = validate_samples(rows, lip)?;
        Ok(Trajectory {
            kind: TrajectoryKind::PiecewiseLinear(data),
            lip,
        })
    }

    /// Same as [`Trajectory::piecewise_linear`] but tagged as file-loaded.
    pub fn sampled(rows: Vec<(f64, Vector)>, lip: f64) -> Result<Self> {
        let data = validate_samples(rows, lip)?;
        Ok(Trajectory {
            kind: TrajectoryKind::Sampled(data),
            lip,
        })
    }

    /// Loads a sampled trajectory from CSV with header `t,h1,...,hn`.
    pub fn load_csv(path: &Path, lip: f64) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(file, lip)
    }

    pub fn read_csv<R: Read>(reader: R, lip: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        {
            let headers = rdr
                .headers()
                .map_err(|e| Error::Malformed(e.to_string()))?;
            if headers.get(0) != Some("t") {
                return Err(Error::Malformed(
                    "trajectory CSV must start with header column `t`".into(),
                ));
            }
        }
        let mut rows = Vec::new();
        for (idx, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Malformed(e.to_string()))?;
            let mut fields = record.iter().map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Malformed(format!("row {}: bad number `{f}`", idx + 1)))
            });
            let t = fields
                .next()
                .ok_or_else(|| Error::Malformed(format!("row {}: empty", idx + 1)))??;
            let comps: Result<Vec<f64>> = fields.collect();
            rows.push((t, Vector(comps?)));
        }
        Self::sampled(rows, lip)
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            TrajectoryKind::Lissajous | TrajectoryKind::RotatingVelocity => 2,
            TrajectoryKind::ConstantPoint(p) => p.dim(),
            TrajectoryKind::PiecewiseLinear(d) | TrajectoryKind::Sampled(d) => {
                d.points.first().map_or(0, Vector::dim)
            }
        }
    }

    /// Evaluates `h_T(t)`.
    pub fn eval(&self, t: f64) -> Vector {
        match &self.kind {
            TrajectoryKind::Lissajous => lissajous(t),
            TrajectoryKind::RotatingVelocity => rotating_velocity(t),
            TrajectoryKind::ConstantPoint(p) => p.clone(),
            TrajectoryKind::PiecewiseLinear(d) | TrajectoryKind::Sampled(d) => interp(d, t),
        }
    }

    /// Spot-checks the declared Lipschitz constant on random time pairs.
    pub fn spot_check_lipschitz(&self, horizon: f64, pairs: usize) -> Result<()> {
        let mut rng = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..pairs {
            let t1 = next() * horizon;
            let t2 = next() * horizon;
            if (t2 - t1).abs() < 1e-9 {
                continue;
            }
            let slope = self.eval(t2).sub(&self.eval(t1)).norm() / (t2 - t1).abs();
            if slope > self.lip * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::LipschitzViolation {
                    lip: self.lip,
                    slope,
                    t0: t1.min(t2),
                    t1: t1.max(t2),
                });
            }
        }
        Ok(())
    }
}

fn validate_samples(rows: Vec<(f64, Vector)>, lip: f64) -> Result<SampledData> {
    if rows.is_empty() {
        return Err(Error::Malformed("trajectory has no samples".into()));
    }
    if rows[0].0 != 0.0 {
        return Err(Error::NonMonotoneTime { row: 0 });
    }
    let dim = rows[0].1.dim();
    let mut times = Vec::with_capacity(rows.len());
    let mut points = Vec::with_capacity(rows.len());
    for (i, (t, p)) in rows.into_iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(Error::NonMonotoneTime { row: i });
            }
            let slope = p.sub(points.last().unwrap()).norm() / (t - prev);
            if slope > lip * (1.0 + 1e-9) {
                return Err(Error::LipschitzViolation {
                    lip,
                    slope,
                    t0: prev,
                    t1: t,
                });
            }
        }
        times.push(t);
        points.push(p);
    }
    Ok(SampledData { times, points })
}

fn interp(data: &SampledData, t: f64) -> Vector {
    let times = &data.times;
    let points = &data.points;
    if t <= times[0] {
        return points[0].clone();
    }
    if t >= *times.last().unwrap() {
        return points.last().unwrap().clone();
    }
    let idx = match times.binary_search_by(|probe| probe.partial_cmp(&t).unwrap()) {
        Ok(i) => return points[i].clone(),
        Err(i) => i,
    };
    let (t0, t1) = (times[idx - 1], times[idx]);
    let w = (t - t0) / (t1 - t0);
    points[idx - 1].scale(1.0 - w).axpy(w, &points[idx])
}

/// A complete interception problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub problem: Problem,
    pub params: ModelParams,
    pub trajectory: Trajectory,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trajectory.dim() != self.params.n {
            return Err(Error::InvalidScenario(format!(
                "trajectory dimension {} does not match n = {}",
                self.trajectory.dim(),
                self.params.n
            )));
        }
        if (self.trajectory.lip - self.params.lip).abs() > 1e-12 {
            return Err(Error::InvalidScenario(format!(
                "params.lip = {} does not match trajectory Lipschitz constant {}",
                self.params.lip, self.trajectory.lip
            )));
        }
        self.trajectory.spot_check_lipschitz(50.0, 10_000)
    }

    pub fn target(&self, t: f64) -> Vector {
        self.trajectory.eval(t)
    }
}
