//! Real branches of the Lambert W function.
//!
//! `W` is the inverse of `w ↦ w e^w`. The principal branch `W0` is defined on
//! `[-1/e, ∞)` with `W0 ≥ -1`; the lower branch `W_{-1}` on `[-1/e, 0)` with
//! `W_{-1} ≤ -1`. Both are evaluated by Halley iteration from series or
//! asymptotic initial guesses; near the branch point `x = -1/e` the
//! square-root expansion in `p = ±sqrt(2(ex + 1))` is used directly, since it
//! is the regime where plain iteration converges slowly.

use crate::error::{Error, Result};

/// Which real branch to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Principal,
    Lower,
}

const NEG_INV_E: f64 = -1.0 / std::f64::consts::E;

/// Inputs within this distance below -1/e are treated as rounding noise and
/// clamped to the branch point.
const BRANCH_POINT_CLAMP: f64 = 1e-14;

/// Evaluates the chosen real branch of the Lambert W function at `x`.
///
/// Returns a domain error for `x < -1/e` (beyond the rounding clamp) and for
/// the lower branch with `x ≥ 0`.
pub fn lambert_w(branch: Branch, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::LambertDomain {
            branch: branch_name(branch),
            x,
        });
    }
    let x = if (NEG_INV_E - BRANCH_POINT_CLAMP..NEG_INV_E).contains(&x) {
        NEG_INV_E
    } else {
        x
    };
    if x < NEG_INV_E {
        return Err(Error::LambertDomain {
            branch: branch_name(branch),
            x,
        });
    }
    match branch {
        Branch::Principal => Ok(w0(x)),
        Branch::Lower => {
            if x >= 0.0 {
                return Err(Error::LambertDomain { branch: "lower", x });
            }
            Ok(wm1(x))
        }
    }
}

/// `W0(e^y)`: the principal branch evaluated at `exp(y)` without overflow.
///
/// Solves `w + ln w = y` directly when `exp(y)` would overflow or lose
/// precision; used by estimator formulas whose argument is only available on
/// a log scale.
pub fn lambert_w0_of_exp(y: f64) -> f64 {
    if y < 500.0 {
        return w0(y.exp());
    }
    // w + ln w = y, Newton iteration; w ≈ y - ln y to start
    let mut w = y - y.ln();
    for _ in 0..50 {
        let f = w + w.ln() - y;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-15 * w.abs() {
            break;
        }
    }
    w
}

fn branch_name(branch: Branch) -> &'static str {
    match branch {
        Branch::Principal => "principal",
        Branch::Lower => "lower",
    }
}

/// Series about the branch point: W = -1 + p - p²/3 + 11p³/72 - 43p⁴/540,
/// with p = ±sqrt(2(ex + 1)).
fn branch_point_series(p: f64) -> f64 {
    -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
}

fn w0(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let q = 2.0 * (std::f64::consts::E * x + 1.0);
    if q <= 0.0 {
        return -1.0;
    }
    let guess = if q < 1e-8 {
        // so close to the branch point that the series is already at full
        // precision and Halley would divide by a vanishing derivative
        return branch_point_series(q.sqrt());
    } else if x < -0.25 {
        branch_point_series(q.sqrt())
    } else if x < 1.0 {
        // series W0(x) ≈ x(1 - x + 3x²/2 - 8x³/3)
        x * (1.0 + x * (-1.0 + x * (1.5 - x * 8.0 / 3.0)))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    halley(x, guess.max(-1.0 + 1e-12))
}

fn wm1(x: f64) -> f64 {
    let q = 2.0 * (std::f64::consts::E * x + 1.0);
    if q <= 0.0 {
        return -1.0;
    }
    let guess = if q < 1e-8 {
        return branch_point_series(-q.sqrt());
    } else if x < -0.25 {
        branch_point_series(-q.sqrt())
    } else {
        // asymptotic near 0⁻: W_{-1}(x) ≈ ln(-x) - ln(-ln(-x))
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    halley(x, guess.min(-1.0 - 1e-12))
}

/// Halley iteration on f(w) = w e^w - x; cubic convergence.
fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}
