//! Modified Bessel function of the second kind for real order.
//!
//! Computed from `K_ν(x) = ∫_0^∞ exp(−x cosh t) cosh(ν t) dt`. The integrand is
//! rescaled by its maximum, the range is truncated where the rescaled integrand
//! falls below `e^{-45}`, and the remainder goes to a step-halving trapezoid rule.

use crate::error::{Result, WalkError};

const TRUNCATION_LOG_DROP: f64 = 45.0;
const REL_TOL: f64 = 1e-13;
const MAX_HALVINGS: usize = 14;

fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn log_integrand(order: f64, x: f64, t: f64) -> f64 {
    -x * t.cosh() + ln_cosh(order * t)
}

/// Location of the maximum of `−x cosh t + ln cosh(ν t)` on `t ≥ 0`.
fn peak(order: f64, x: f64) -> f64 {
    // slope ν tanh(ν t) − x sinh t is decreasing once positive; it starts at 0 with
    // curvature ν² − x, so the maximum is at 0 unless ν² > x.
    if order * order <= x {
        return 0.0;
    }
    let slope = |t: f64| order * (order * t).tanh() - x * t.sinh();
    let mut lo = 0.0;
    let mut hi = (order / x).asinh() + 1.0;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if slope(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `(ln of the integrand maximum, integral of the rescaled integrand)`.
///
/// The integrand is even and analytic in `t`, so the trapezoid rule on `[0, t_max]`
/// (half weight at 0, negligible mass at `t_max`) converges geometrically in the step.
fn scaled_integral(order: f64, x: f64) -> (f64, f64) {
    let order = order.abs();
    let t0 = peak(order, x);
    let top = log_integrand(order, x, t0);
    let drop = |t: f64| log_integrand(order, x, t) - top;
    let mut step = 1.0;
    while drop(t0 + step) > -TRUNCATION_LOG_DROP {
        step *= 2.0;
    }
    let (mut lo, mut hi) = (t0, t0 + step);
    for _ in 0..100 {
        let m = 0.5 * (lo + hi);
        if drop(m) > -TRUNCATION_LOG_DROP {
            lo = m;
        } else {
            hi = m;
        }
    }
    let t_max = hi;
    let f = |t: f64| drop(t).exp();
    let mut cells = 64usize;
    let mut h = t_max / cells as f64;
    let mut sum = 0.5 * f(0.0) + (1..cells).map(|k| f(k as f64 * h)).sum::<f64>();
    let mut estimate = h * sum;
    for _ in 0..MAX_HALVINGS {
        // new nodes sit at odd multiples of the halved step
        sum += (0..cells).map(|k| f((2 * k + 1) as f64 * 0.5 * h)).sum::<f64>();
        cells *= 2;
        h *= 0.5;
        let next = h * sum;
        let converged = (next - estimate).abs() <= REL_TOL * next;
        estimate = next;
        if converged {
            break;
        }
    }
    (top, estimate)
}

fn check_args(order: f64, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(WalkError::Domain(format!("Bessel K needs x > 0, got {x}")));
    }
    if !order.is_finite() {
        return Err(WalkError::Domain(format!("Bessel K order {order} is not finite")));
    }
    Ok(())
}

/// `ln K_ν(x)` for real `ν` and `x > 0`; finite even where `K_ν(x)` overflows.
pub fn ln_bessel_k(order: f64, x: f64) -> Result<f64> {
    check_args(order, x)?;
    let (top, integral) = scaled_integral(order, x);
    Ok(top + integral.ln())
}

/// `K_ν(x)` for real `ν` and `x > 0`.
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    let ln = ln_bessel_k(order, x)?;
    if ln > 709.0 {
        return Err(WalkError::Range(format!("K_{order}({x}) overflows double precision")));
    }
    Ok(ln.exp())
}
