//! Shared tolerances for exact-identity checks.

/// Absolute tolerance on residuals such as `‖πP − π‖∞` and row sums.
pub const RESIDUAL: f64 = 1e-12;
/// Relative tolerance for two algebraic routes to the same quantity.
pub const IDENTITY_REL: f64 = 1e-10;
/// Tolerance used when reading the scalar drift off a divergence map.
pub const DIVERGENCE_GATE: f64 = 1e-9;
/// Condition estimates above this are logged as warnings.
pub const CONDITION_WARN: f64 = 1e12;

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
