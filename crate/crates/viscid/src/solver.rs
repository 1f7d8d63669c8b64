//! Minimum-time interception via monotone fixed-point iteration.
//!
//! Both estimators map a time `t` at which interception is impossible to a
//! strictly larger time that is still a lower bound on the minimum
//! interception time, for every target with the declared Lipschitz constant.
//! Iterating from `t_0 = 0` therefore converges to the minimum time from
//! below; the loop stops once the distance to the reachable-set projection
//! falls under `ℓ(1 + ε)`.
//!
//! The simple estimator advances by `(ρ - ℓ) / (vmax + v)`. The best
//! estimator solves the tangency equation `ρ(θ, h) = v(θ - t) + ℓ` exactly,
//! which has a Lambert-W closed form when the initial speed is zero; it never
//! takes a smaller step than the simple one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambert::{lambert_w, lambert_w0_of_exp, Branch};
use crate::model::{propagate_const, ModelParams, State, Vector};
use crate::reach::{dist_position, dist_velocity, reach_ball_position, reach_ball_velocity};
use crate::targets::{Problem, Scenario};

/// Which universal lower estimator drives the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Simple,
    Best,
}

impl EstimatorKind {
    /// The best estimator's closed form holds only for zero initial speed.
    pub fn check_applicable(self, params: &ModelParams) -> Result<()> {
        if self == EstimatorKind::Best && params.v0 != 0.0 {
            return Err(Error::InvalidScenario(format!(
                "the best estimator requires v0 = 0 (got v0 = {})",
                params.v0
            )));
        }
        Ok(())
    }
}

/// Distance from `h` to the relevant reachable-set projection.
pub fn rho(t: f64, h: &Vector, params: &ModelParams, problem: Problem) -> f64 {
    match problem {
        Problem::Position => dist_position(t, h, params),
        Problem::Velocity => dist_velocity(t, h, params),
    }
}

/// Simple universal lower estimator: advance by `(ρ - ℓ) / (vmax + v)`.
pub fn tau_simple(t: f64, h: &Vector, params: &ModelParams, problem: Problem) -> f64 {
    let d = rho(t, h, params, problem);
    if d > params.ell {
        t + (d - params.ell) / (params.vmax + params.lip)
    } else {
        t
    }
}

/// Best lower estimator for position interception with `v0 = 0`.
///
/// The smallest `θ ≥ t` with `‖h‖ - (θ - 1 + e^{-θ}) = v(θ - t) + ℓ`,
/// in closed form through the principal Lambert branch.
pub fn t_best_position(t: f64, h: &Vector, params: &ModelParams) -> f64 {
    debug_assert_eq!(params.v0, 0.0);
    if rho(t, h, params, Problem::Position) <= params.ell {
        return t;
    }
    let hn = h.norm();
    let v = params.lip;
    let a = (1.0 + v * t - params.ell + hn) / (1.0 + v);
    let arg = -(-a).exp() / (1.0 + v);
    let w = lambert_w(Branch::Principal, arg)
        .expect("estimator argument provably within the principal branch domain");
    t + (hn + 1.0 - params.ell - t) / (1.0 + v) + w
}

/// Outcome of the best velocity estimator: the step, or a proof that the
/// required speed can never be attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BestVelocityStep {
    Reachable(f64),
    Unreachable,
}

/// Best lower estimator for velocity reaching with `v0 = 0`.
///
/// For a resting target (`v = 0`) a speed `‖h‖ - ℓ ≥ 1` is unattainable and
/// the step is `Unreachable`; otherwise the root of the tangency equation is
/// explicit: `-ln(1 + ℓ - ‖h‖)` for `v = 0`, a Lambert-W expression for
/// `v > 0`.
pub fn t_best_velocity(t: f64, h: &Vector, params: &ModelParams) -> BestVelocityStep {
    debug_assert_eq!(params.v0, 0.0);
    if rho(t, h, params, Problem::Velocity) <= params.ell {
        return BestVelocityStep::Reachable(t);
    }
    let hn = h.norm();
    let v = params.lip;
    if v == 0.0 {
        if 1.0 + params.ell <= hn {
            return BestVelocityStep::Unreachable;
        }
        return BestVelocityStep::Reachable(-(1.0 + params.ell - hn).ln());
    }
    // W0(e^{-t + (1+ℓ-‖h‖)/v} / v), evaluated on the log scale so small v
    // cannot overflow the exponential
    let y = -t + (1.0 + params.ell - hn) / v - v.ln();
    let w = lambert_w0_of_exp(y);
    BestVelocityStep::Reachable(t + (hn - 1.0 - params.ell) / v + w)
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationStatus {
    Converged,
    MaxIterations,
    Unreachable,
}

/// One fixed-point iteration step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub i: usize,
    pub t: f64,
    pub dist: f64,
    pub step: f64,
}

/// The monotone iteration record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
    pub status: TerminationStatus,
    pub t_final: f64,
    pub k: usize,
}

/// A solved interception instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterceptSolution {
    /// Approximate minimum interception time.
    pub t_star: f64,
    /// Constant optimal control direction (unit vector).
    pub control_dir: Vector,
    /// Set when the target sat exactly on the projection center and the
    /// control direction was chosen arbitrarily.
    pub degenerate_direction: bool,
    pub trace: IterationTrace,
}

pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Runs the fixed-point iteration from `t_0 = 0`.
pub fn solve_intercept(
    scenario: &Scenario,
    estimator: EstimatorKind,
    eps: f64,
    max_iter: usize,
) -> Result<InterceptSolution> {
    solve_intercept_from(scenario, estimator, eps, max_iter, 0.0)
}

/// Runs the fixed-point iteration from an explicit warm start `t_0 ≥ 0`.
///
/// The estimators are valid lower bounds from any starting time, so a warm
/// start below the minimum interception time preserves convergence.
pub fn solve_intercept_from(
    scenario: &Scenario,
    estimator: EstimatorKind,
    eps: f64,
    max_iter: usize,
    t0: f64,
) -> Result<InterceptSolution> {
    if eps <= 0.0 {
        return Err(Error::InvalidScenario(format!(
            "relative error eps = {eps} must be > 0"
        )));
    }
    if t0 < 0.0 {
        return Err(Error::InvalidScenario(format!(
            "warm start t0 = {t0} must be ≥ 0"
        )));
    }
    scenario.validate()?;
    estimator.check_applicable(&scenario.params)?;

    let params = &scenario.params;
    let problem = scenario.problem;
    let threshold = params.ell * (1.0 + eps);
    let mut steps = Vec::new();
    let mut t = t0;
    let mut prev_t = t0;
    let mut status = TerminationStatus::MaxIterations;
    for i in 0..=max_iter {
        let h = scenario.target(t);
        let d = rho(t, &h, params, problem);
        steps.push(TraceStep {
            i,
            t,
            dist: d,
            step: t - prev_t,
        });
        if d < threshold || (params.ell == 0.0 && d == 0.0) {
            status = TerminationStatus::Converged;
            break;
        }
        if i == max_iter {
            break;
        }
        let next = match estimator {
            EstimatorKind::Simple => tau_simple(t, &h, params, problem),
            EstimatorKind::Best => match problem {
                Problem::Position => t_best_position(t, &h, params),
                Problem::Velocity => match t_best_velocity(t, &h, params) {
                    BestVelocityStep::Reachable(next) => next,
                    BestVelocityStep::Unreachable => {
                        status = TerminationStatus::Unreachable;
                        break;
                    }
                },
            },
        };
        prev_t = t;
        t = next;
    }
    let k = steps.len().saturating_sub(1);
    let trace = IterationTrace {
        steps,
        status,
        t_final: t,
        k,
    };
    let (control_dir, degenerate) = synthesize_direction(scenario, t);
    Ok(InterceptSolution {
        t_star: t,
        control_dir,
        degenerate_direction: degenerate,
        trace,
    })
}

/// Constant control direction from the projection center toward the target.
fn synthesize_direction(scenario: &Scenario, t: f64) -> (Vector, bool) {
    let center = match scenario.problem {
        Problem::Position => reach_ball_position(t, &scenario.params).center,
        Problem::Velocity => reach_ball_velocity(t, &scenario.params).center,
    };
    let diff = scenario.target(t).sub(&center);
    match diff.unit() {
        Some(u) => (u, false),
        None => (Vector::along_first_axis(1.0, scenario.params.n), true),
    }
}

/// Polishes a fixed-point output into a root of `ρ(t, h_T(t)) = ℓ`.
///
/// Secant iteration with a numerical derivative, safeguarded by bisection on
/// a bracket grown outward from `t0`. Because every fixed-point iterate is a
/// lower bound, `g(t) = ρ(t, h_T(t)) - ℓ` is nonnegative before the first
/// root; the bracket search walks forward (or backward, if the stopping rule
/// overshot) until the sign changes.
pub fn newton_polish(t0: f64, scenario: &Scenario, tol: f64) -> Result<f64> {
    let g = |t: f64| {
        rho(t, &scenario.target(t), &scenario.params, scenario.problem) - scenario.params.ell
    };
    let g0 = g(t0);
    if g0.abs() <= tol {
        return Ok(t0);
    }
    let (mut lo, mut hi) = if g0 > 0.0 {
        let mut a = t0;
        let mut step = (t0.abs() * 1e-3).max(1e-3);
        let mut b = a + step;
        let mut found = false;
        for _ in 0..200 {
            if g(b) <= 0.0 {
                found = true;
                break;
            }
            a = b;
            step *= 2.0;
            b = a + step;
        }
        if !found {
            return Err(Error::NoBracket { t0 });
        }
        (a, b)
    } else {
        let mut b = t0;
        let mut step = (t0.abs() * 1e-3).max(1e-3);
        let mut a = (b - step).max(0.0);
        let mut found = false;
        for _ in 0..200 {
            if g(a) >= 0.0 {
                found = true;
                break;
            }
            if a == 0.0 {
                // captured from the start
                return Ok(0.0);
            }
            b = a;
            step *= 2.0;
            a = (b - step).max(0.0);
        }
        if !found {
            return Err(Error::NoBracket { t0 });
        }
        (a, b)
    };
    // safeguarded Newton with finite-difference derivative
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gt = g(t);
        if gt.abs() <= tol {
            return Ok(t);
        }
        if gt > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let h = 1e-7 * (1.0 + t.abs());
        let dg = (g(t + h) - g(t - h.min(t))) / (h + h.min(t));
        let candidate = if dg != 0.0 { t - gt / dg } else { f64::NAN };
        t = if candidate.is_finite() && candidate > lo && candidate < hi {
            candidate
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * (1.0 + hi.abs()) {
            return Ok(t);
        }
    }
    Ok(t)
}

/// Forward-verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub t_star: f64,
    /// Terminal miss distance in the problem's component space.
    pub miss: f64,
    /// `ℓ(1 + ε)` used for the pass decision.
    pub threshold: f64,
    pub pass: bool,
    /// Terminal state reached under the constant synthesized control.
    pub terminal: State,
}

/// Propagates the initial state under the solution's constant control and
/// reports the terminal miss against `ℓ(1 + ε)`.
pub fn verify_solution(
    sol: &InterceptSolution,
    scenario: &Scenario,
    eps: f64,
) -> Result<VerifyReport> {
    let start = State::initial(scenario.params.v0, scenario.params.n);
    let terminal = propagate_const(&start, &sol.control_dir, sol.t_star)?;
    let component = match scenario.problem {
        Problem::Position => &terminal.r,
        Problem::Velocity => &terminal.v,
    };
    let miss = component.sub(&scenario.target(sol.t_star)).norm();
    let threshold = scenario.params.ell * (1.0 + eps);
    Ok(VerifyReport {
        t_star: sol.t_star,
        miss,
        threshold,
        pass: miss <= threshold,
        terminal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::Trajectory;
    use approx::assert_abs_diff_eq;

    fn params(v0: f64, ell: f64, lip: f64, vmax: f64) -> ModelParams {
        ModelParams {
            n: 2,
            v0,
            ell,
            lip,
            vmax,
        }
    }

    fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn tau_simple_examples() {
        let p = params(0.5, 0.1, 0.5, 1.0);
        let h = Vector(vec![1.0, 0.0]);
        // ball degenerate at t = 0 → ρ = ‖h‖ = 1
        assert_abs_diff_eq!(tau_simple(0.0, &h, &p, Problem::Position), 0.6, epsilon = 1e-14);
        // inside the ball → unchanged
        let inside = Vector(vec![0.0, 0.0]);
        assert_abs_diff_eq!(tau_simple(0.7, &inside, &p, Problem::Position), 0.7);

        let pv = params(0.0, 0.1, 0.0, 2.0);
        let hv = Vector(vec![0.6, 0.0]);
        assert_abs_diff_eq!(tau_simple(0.0, &hv, &pv, Problem::Velocity), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn best_position_matches_bisection() {
        let p = params(0.0, 0.1, 0.5, 1.0);
        let h = Vector(vec![2.0, 0.0]);
        let got = t_best_position(0.0, &h, &p);
        let root = bisect(|th| 2.0 - (th - 1.0 + (-th).exp()) - 0.5 * th - 0.1, 0.0, 10.0);
        assert_abs_diff_eq!(got, root, epsilon = 1e-10);
        assert!((got - 1.826).abs() < 1e-2);
    }

    #[test]
    fn best_position_at_capture() {
        let p = params(0.0, 0.3, 0.0, 1.0);
        let h = Vector(vec![0.3, 0.0]);
        assert_eq!(t_best_position(0.0, &h, &p), 0.0);
    }

    #[test]
    fn best_dominates_simple() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let p = params(0.0, 0.05 + 0.2 * next(), next(), 1.0);
            let t = 3.0 * next();
            let h = Vector(vec![0.5 + 3.0 * next(), 2.0 * next() - 1.0]);
            if rho(t, &h, &p, Problem::Position) <= p.ell {
                continue;
            }
            let best = t_best_position(t, &h, &p);
            let simple = tau_simple(t, &h, &p, Problem::Position);
            assert!(best >= simple - 1e-10, "best {best} < simple {simple}");
        }
    }

    #[test]
    fn best_velocity_cases() {
        let p = params(0.0, 0.1, 0.0, 2.0);
        let h = Vector(vec![0.6, 0.0]);
        match t_best_velocity(0.0, &h, &p) {
            BestVelocityStep::Reachable(t) => {
                assert_abs_diff_eq!(t, -(0.5f64).ln(), epsilon = 1e-12);
                let root = bisect(|th| 0.6 - (1.0 - (-th).exp()) - 0.1, 0.0, 10.0);
                assert_abs_diff_eq!(t, root, epsilon = 1e-10);
            }
            other => panic!("expected reachable, got {other:?}"),
        }
        let far = Vector(vec![1.2, 0.0]);
        assert_eq!(t_best_velocity(0.0, &far, &p), BestVelocityStep::Unreachable);

        let pl = params(0.0, 0.1, 0.8, 2.0);
        match t_best_velocity(0.0, &h, &pl) {
            BestVelocityStep::Reachable(t) => {
                let root = bisect(|th| 0.6 - (1.0 - (-th).exp()) - 0.8 * th - 0.1, 0.0, 10.0);
                assert_abs_diff_eq!(t, root, epsilon = 1e-10);
            }
            other => panic!("expected reachable, got {other:?}"),
        }
    }

    #[test]
    fn best_fixed_point_equation() {
        // ρ(T_best(t,h), h) = v (T_best - t) + ℓ whenever the step advances
        let p = params(0.0, 0.1, 0.4, 1.0);
        let h = Vector(vec![1.7, 0.6]);
        let t = 0.3;
        let theta = t_best_position(t, &h, &p);
        assert!(theta > t);
        let lhs = rho(theta, &h, &p, Problem::Position);
        assert_abs_diff_eq!(lhs, 0.4 * (theta - t) + 0.1, epsilon = 1e-9);
    }

    #[test]
    fn trivial_capture_converges_immediately() {
        let sc = Scenario {
            problem: Problem::Position,
            params: params(0.0, 0.5, 0.0, 1.0),
            trajectory: Trajectory::constant(Vector(vec![0.2, 0.0])),
        };
        let sol = solve_intercept(&sc, EstimatorKind::Simple, 1e-3, 100).unwrap();
        assert_eq!(sol.trace.status, TerminationStatus::Converged);
        assert_eq!(sol.t_star, 0.0);
        assert_eq!(sol.trace.k, 0);
    }

    #[test]
    fn lissajous_problem1_converges() {
        let sc = Scenario {
            problem: Problem::Position,
            params: params(0.5, 0.1, crate::targets::LISSAJOUS_LIP, 1.0),
            trajectory: Trajectory::lissajous(),
        };
        let sol = solve_intercept(&sc, EstimatorKind::Simple, 1e-3, 100_000).unwrap();
        assert_eq!(sol.trace.status, TerminationStatus::Converged);
        let lip = crate::targets::LISSAJOUS_LIP;
        assert_abs_diff_eq!(sol.trace.steps[1].t, 0.9 / (1.0 + lip), epsilon = 1e-12);
        let mut prev = -1.0;
        for s in &sol.trace.steps {
            assert!(s.t > prev);
            prev = s.t;
        }
        let report = verify_solution(&sol, &sc, 1e-3).unwrap();
        assert!(report.pass, "miss {} > {}", report.miss, report.threshold);
    }

    #[test]
    fn rotating_velocity_problem2_converges() {
        let sc = Scenario {
            problem: Problem::Velocity,
            params: params(0.5, 0.1, 0.8, 2.0),
            trajectory: Trajectory::rotating_velocity(),
        };
        let sol = solve_intercept(&sc, EstimatorKind::Simple, 1e-3, 100_000).unwrap();
        assert_eq!(sol.trace.status, TerminationStatus::Converged);
        let report = verify_solution(&sol, &sc, 1e-3).unwrap();
        assert!(report.pass, "miss {} > {}", report.miss, report.threshold);
    }

    #[test]
    fn unreachable_velocity_target() {
        let sc = Scenario {
            problem: Problem::Velocity,
            params: params(0.0, 0.1, 0.0, 2.0),
            trajectory: Trajectory::constant(Vector(vec![1.5, 0.0])),
        };
        let sol = solve_intercept(&sc, EstimatorKind::Best, 1e-3, 1000).unwrap();
        assert_eq!(sol.trace.status, TerminationStatus::Unreachable);
    }

    #[test]
    fn best_estimator_rejects_moving_start() {
        let sc = Scenario {
            problem: Problem::Position,
            params: params(0.5, 0.1, crate::targets::LISSAJOUS_LIP, 1.0),
            trajectory: Trajectory::lissajous(),
        };
        assert!(solve_intercept(&sc, EstimatorKind::Best, 1e-3, 100).is_err());
    }

    #[test]
    fn newton_polish_agrees_with_dense_scan() {
        let sc = Scenario {
            problem: Problem::Position,
            params: params(0.5, 0.1, crate::targets::LISSAJOUS_LIP, 1.0),
            trajectory: Trajectory::lissajous(),
        };
        let sol = solve_intercept(&sc, EstimatorKind::Simple, 0.5, 100_000).unwrap();
        let polished = newton_polish(sol.t_star, &sc, 1e-10).unwrap();
        let g = |t: f64| rho(t, &sc.target(t), &sc.params, sc.problem) - sc.params.ell;
        assert!(g(polished).abs() <= 1e-10);
        // dense scan oracle
        let mut root = None;
        let mut t = 0.0;
        while t < 3.0 * polished.max(1.0) {
            if g(t) > 0.0 && g(t + 1e-4) <= 0.0 {
                root = Some(bisect(g, t, t + 1e-4));
                break;
            }
            t += 1e-4;
        }
        let root = root.expect("dense scan found no root");
        assert_abs_diff_eq!(polished, root, epsilon = 1e-8);
    }

    #[test]
    fn newton_polish_noop_within_tol() {
        let sc = Scenario {
            problem: Problem::Position,
            params: params(0.0, 0.1, 0.0, 1.0),
            trajectory: Trajectory::constant(Vector(vec![2.0, 0.0])),
        };
        let root = newton_polish(0.5, &sc, 1e-10).unwrap();
        // also: a t0 already at the root stays put
        assert_abs_diff_eq!(newton_polish(root, &sc, 1e-6).unwrap(), root);
    }

    #[test]
    fn monotone_linear_target_matches_closed_form() {
        // target moving straight away along the line at exactly its
        // Lipschitz rate: the polished root equals the closed-form estimate
        // with v equal to the true speed
        let rows = vec![
            (0.0, Vector(vec![2.0, 0.0])),
            (100.0, Vector(vec![2.0 - 0.3 * 100.0, 0.0])),
        ];
        let sc = Scenario {
            problem: Problem::Position,
            params: params(0.0, 0.1, 0.3, 1.0),
            trajectory: Trajectory::piecewise_linear(rows, 0.3).unwrap(),
        };
        let sol = solve_intercept(&sc, EstimatorKind::Simple, 1e-6, 1_000_000).unwrap();
        let polished = newton_polish(sol.t_star, &sc, 1e-12).unwrap();
        let closed = t_best_position(0.0, &Vector(vec![2.0, 0.0]), &sc.params);
        assert_abs_diff_eq!(polished, closed, epsilon = 1e-8);
    }

    #[test]
    fn perturbed_direction_increases_miss() {
        let sc = Scenario {
            problem: Problem::Position,
            params: params(0.5, 0.1, crate::targets::LISSAJOUS_LIP, 1.0),
            trajectory: Trajectory::lissajous(),
        };
        let sol = solve_intercept(&sc, EstimatorKind::Simple, 1e-3, 100_000).unwrap();
        let base = verify_solution(&sol, &sc, 1e-3).unwrap();
        let (c, s) = (0.2f64.cos(), 0.2f64.sin());
        let d = &sol.control_dir;
        let mut rotated = sol.clone();
        rotated.control_dir = Vector(vec![c * d.0[0] - s * d.0[1], s * d.0[0] + c * d.0[1]]);
        let worse = verify_solution(&rotated, &sc, 1e-3).unwrap();
        assert!(worse.miss > base.miss);
    }
}
