//! Law of `S = ln X` for a generalized inverse Gaussian variate `X`.
//!
//! `GigLaw { order: γ, coef: c }` has density on ℝ
//!
//! ```text
//!     exp(γ s − c cosh s) / (2 K_γ(c))
//! ```
//!
//! Conversion to the conventional three-parameter GIG of the positive variate
//! `X = e^S` with density `∝ x^{λ−1} exp(−(χ/x + ψ x)/2)`:
//!
//! | here        | conventional |
//! |-------------|--------------|
//! | `order` γ   | λ = γ        |
//! | `coef` c    | χ = ψ = c    |
//!
//! The product-ratio statistic Γ enters as `c = 2Γ`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bessel::{bessel_k, ln_bessel_k};
use super::quad::GaussRule;
use crate::error::{Result, WalkError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GigLaw {
    order: f64,
    coef: f64,
    ln_norm: f64,
}

impl GigLaw {
    pub fn new(order: f64, coef: f64) -> Result<Self> {
        if !order.is_finite() {
            return Err(WalkError::Parameter(format!("GIG order {order} is not finite")));
        }
        if !(coef > 0.0 && coef.is_finite()) {
            return Err(WalkError::Parameter(format!("GIG coefficient {coef} must be positive")));
        }
        let ln_norm = std::f64::consts::LN_2 + ln_bessel_k(order, coef)?;
        Ok(Self { order, coef, ln_norm })
    }

    /// The conditional law of `S` given `Γ = gamma_stat` in the product-ratio identity.
    pub fn for_gamma_stat(order: f64, gamma_stat: f64) -> Result<Self> {
        Self::new(order, 2.0 * gamma_stat)
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn coef(&self) -> f64 {
        self.coef
    }

    /// `ln(2 K_γ(c))`.
    pub fn ln_normalizer(&self) -> f64 {
        self.ln_norm
    }

    fn ln_kernel(&self, s: f64) -> f64 {
        self.order * s - self.coef * s.cosh()
    }

    pub fn logpdf_s(&self, s: f64) -> f64 {
        self.ln_kernel(s) - self.ln_normalizer()
    }

    /// Mode of the density of `S`: the root of `γ = c sinh s`.
    pub fn mode(&self) -> f64 {
        (self.order / self.coef).asinh()
    }

    /// `E[e^S] = K_{γ+1}(c) / K_γ(c)`.
    pub fn mean_exp(&self) -> Result<f64> {
        Ok((ln_bessel_k(self.order + 1.0, self.coef)? - ln_bessel_k(self.order, self.coef)?).exp())
    }

    pub fn pdf_s(&self, s: f64) -> f64 {
        self.logpdf_s(s).exp()
    }

    /// `s ≥ mode` (or `≤` for `upward = false`) where the log-density has dropped by `drop`.
    fn tail_point(&self, drop: f64, upward: bool) -> f64 {
        let m = self.mode();
        let top = self.ln_kernel(m);
        let sign = if upward { 1.0 } else { -1.0 };
        let below = |y: f64| self.ln_kernel(m + sign * y) - top < -drop;
        let mut hi = (1.0 / (self.coef * m.cosh())).sqrt().max(1e-3);
        while !below(hi) {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if below(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        m + sign * hi
    }

    /// Cumulative distribution function of `S`, tabulated once for repeated evaluation.
    pub fn cdf_table(&self) -> GigCdf {
        GigCdf::new(*self)
    }

    /// One exact draw of `S`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        RouSampler::new(self.order, self.coef).sample(rng)
    }
}

/// `S` law written as `exp(c x − a e^x − b e^{−x})`; it is a `GigLaw` shifted by `½ ln(b/a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpCoshLaw {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

impl ExpCoshLaw {
    pub fn new(c: f64, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(WalkError::Parameter(format!("exp-cosh law needs a, b > 0 (got a = {a}, b = {b}, c = {c})")));
        }
        Ok(Self { c, a, b })
    }

    pub fn shift(&self) -> f64 {
        0.5 * (self.b / self.a).ln()
    }

    pub fn centred(&self) -> GigLaw {
        GigLaw::new(self.c, 2.0 * (self.a * self.b).sqrt()).expect("a, b > 0 by construction")
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        RouSampler::new(self.c, 2.0 * (self.a * self.b).sqrt()).sample(rng) + self.shift()
    }

    pub fn ln_kernel(&self, x: f64) -> f64 {
        self.c * x - self.a * x.exp() - self.b * (-x).exp()
    }
}

/// Ratio-of-uniforms sampler with the bounding rectangle shifted to the mode.
///
/// With `h(s) = exp(ln_kernel(s) − ln_kernel(m))` the region
/// `{(u, v): 0 < u ≤ √h(m + v/u)}` has area `∫h / 2`; it is enclosed in
/// `[0, 1] × [v₋, v₊]` with `v± = extremes of y √h(m + y)`.
#[derive(Debug, Clone, Copy)]
pub struct RouSampler {
    order: f64,
    coef: f64,
    mode: f64,
    top: f64,
    v_minus: f64,
    v_plus: f64,
}

impl RouSampler {
    /// Sampler for `GigLaw { order, coef }`; the arguments are assumed valid.
    pub fn new(order: f64, coef: f64) -> Self {
        let ln_kernel = move |s: f64| order * s - coef * s.cosh();
        let mode = (order / coef).asinh();
        let top = ln_kernel(mode);
        // the extremes of ln|y| + ½(ln_kernel(m + y) − top) solve
        //   F(y) = 1/y + ½(γ − c sinh(m + y)) = 0,
        // with F strictly decreasing on each half-line
        let f = |y: f64| 1.0 / y + 0.5 * (order - coef * (mode + y).sinh());
        let df = |y: f64| -1.0 / (y * y) - 0.5 * coef * (mode + y).cosh();
        let root = |sign: f64| -> f64 {
            let mut near = 0.0;
            let mut far = sign;
            while f(far) * sign > 0.0 {
                near = far;
                far *= 2.0;
            }
            // bracket [near, far] with F(near)·sign > 0 ≥ F(far)·sign; safeguarded Newton
            let mut y = 0.5 * (near + far);
            for _ in 0..100 {
                let fy = f(y);
                if fy * sign > 0.0 {
                    near = y;
                } else {
                    far = y;
                }
                let newton = y - fy / df(y);
                let inside = (newton - near) * (newton - far) < 0.0;
                let next = if inside { newton } else { 0.5 * (near + far) };
                if (next - y).abs() <= 1e-14 * y.abs() {
                    y = next;
                    break;
                }
                y = next;
            }
            y
        };
        let bound = |y: f64| y * (0.5 * (ln_kernel(mode + y) - top)).exp();
        // the optimum is flat, so a small outward inflation keeps the rectangle enclosing
        let v_plus = bound(root(1.0)) * (1.0 + 1e-9);
        let v_minus = bound(root(-1.0)) * (1.0 + 1e-9);
        Self { order, coef, mode, top, v_minus, v_plus }
    }

    /// Probability that one proposal is accepted.
    pub fn acceptance_rate(&self) -> f64 {
        let law = GigLaw::new(self.order, self.coef).expect("sampler parameters are valid");
        let ln_mass = law.ln_normalizer() - self.top;
        0.5 * ln_mass.exp() / (self.v_plus - self.v_minus)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = 1.0 - rng.random::<f64>();
            let v = self.v_minus + (self.v_plus - self.v_minus) * rng.random::<f64>();
            let y = v / u;
            let s = self.mode + y;
            if 2.0 * u.ln() <= self.order * s - self.coef * s.cosh() - self.top {
                return s;
            }
        }
    }
}

const CDF_CELLS: usize = 256;
const CDF_NODES: usize = 16;

/// Tabulated CDF of `S`: Gauss–Legendre cells between points where the density has
/// dropped by `e^{-50}` from its mode, with partial cells integrated on demand.
#[derive(Debug, Clone)]
pub struct GigCdf {
    law: GigLaw,
    ln_norm: f64,
    lo: f64,
    width: f64,
    cumulative: Vec<f64>,
    rule: GaussRule,
}

impl GigCdf {
    fn new(law: GigLaw) -> Self {
        let lo = law.tail_point(50.0, false);
        let hi = law.tail_point(50.0, true);
        let width = (hi - lo) / CDF_CELLS as f64;
        let rule = GaussRule::new(CDF_NODES);
        let ln_norm = law.ln_normalizer();
        let density = |s: f64| (law.ln_kernel(s) - ln_norm).exp();
        let mut cumulative = Vec::with_capacity(CDF_CELLS + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for k in 0..CDF_CELLS {
            let a = lo + k as f64 * width;
            acc += rule.integrate(density, a, a + width);
            cumulative.push(acc);
        }
        Self { law, ln_norm, lo, width, cumulative, rule }
    }

    pub fn law(&self) -> GigLaw {
        self.law
    }

    /// Total tabulated mass; equals 1 up to quadrature and truncation error.
    pub fn total_mass(&self) -> f64 {
        self.cumulative[CDF_CELLS]
    }

    pub fn cdf(&self, s: f64) -> f64 {
        if s.is_nan() {
            return f64::NAN;
        }
        let pos = (s - self.lo) / self.width;
        if pos <= 0.0 {
            return 0.0;
        }
        if pos >= CDF_CELLS as f64 {
            return 1.0;
        }
        let k = pos as usize;
        let a = self.lo + k as f64 * self.width;
        let law = self.law;
        let ln_norm = self.ln_norm;
        let partial = self.rule.integrate(|t| (law.ln_kernel(t) - ln_norm).exp(), a, s);
        (self.cumulative[k] + partial).clamp(0.0, 1.0)
    }
}

/// `P(S ≤ s)` for one point, without tabulating: the ratio of Gauss–Legendre
/// integrals of the unnormalized kernel below and above `s`, truncated where the
/// log-kernel has dropped 50 below its mode.
pub fn gig_cdf_point(order: f64, coef: f64, s: f64) -> Result<f64> {
    const PANELS: usize = 24;
    if !order.is_finite() || !(coef > 0.0 && coef.is_finite()) {
        return Err(WalkError::Parameter(format!("GIG parameters ({order}, {coef}) out of range")));
    }
    if s.is_nan() {
        return Ok(f64::NAN);
    }
    // Only the kernel is needed; the normalizer cancels in the ratio.
    let law = GigLaw { order, coef, ln_norm: f64::NAN };
    thread_local! {
        static RULE: GaussRule = GaussRule::new(CDF_NODES);
    }
    let lo = law.tail_point(50.0, false);
    let hi = law.tail_point(50.0, true);
    if s <= lo {
        return Ok(0.0);
    }
    if s >= hi {
        return Ok(1.0);
    }
    let top = law.ln_kernel(law.mode());
    let f = |t: f64| (law.ln_kernel(t) - top).exp();
    RULE.with(|rule| {
        let integrate = |a: f64, b: f64| {
            let h = (b - a) / PANELS as f64;
            (0..PANELS).map(|k| rule.integrate(f, a + k as f64 * h, a + (k + 1) as f64 * h)).sum::<f64>()
        };
        let below = integrate(lo, s);
        let above = integrate(s, hi);
        Ok(below / (below + above))
    })
}

/// Density check helper used by tests and self-checks: `K_γ(c)` through the Bessel routine.
pub fn normalizer(law: &GigLaw) -> Result<f64> {
    Ok(2.0 * bessel_k(law.order, law.coef)?)
}
