//! Closed-form tail bounds, deviation radii and constants.
//!
//! Everything here is a pure function of its scalar arguments. Values larger
//! than 1 are returned as-is; clamping to [0,1] happens only when a report is
//! rendered, so the algebraic identities between the formulas stay testable.

use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

pub const LOG2: f64 = std::f64::consts::LN_2;
pub const E: f64 = std::f64::consts::E;

/// A tail certificate: `P(X >= t) <= gamma_factor * exp(-rate * t)` for all t >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTail {
    /// The constant Γ in front of the exponential.
    pub gamma_factor: f64,
    /// The decay rate γ per unit t.
    pub rate: f64,
}

impl ExpTail {
    pub fn new(gamma_factor: f64, rate: f64) -> Result<Self> {
        if !(gamma_factor > 0.0) {
            return Err(domain("ExpTail: gamma_factor must be positive"));
        }
        if !(rate > 0.0) {
            return Err(domain("ExpTail: rate must be positive"));
        }
        Ok(ExpTail { gamma_factor, rate })
    }

    /// Evaluates the certified bound at t.
    pub fn bound_at(&self, t: f64) -> f64 {
        self.gamma_factor * (-self.rate * t).exp()
    }

    /// Smallest t at which the (clamped) bound becomes nontrivial,
    /// i.e. the solution of `gamma_factor * exp(-rate t) = 1`.
    pub fn nontrivial_from(&self) -> f64 {
        self.gamma_factor.ln() / self.rate
    }
}

/// Clamp a bound to a reportable probability in [0, 1].
pub fn clamp_prob(b: f64) -> f64 {
    b.clamp(0.0, 1.0)
}

/// Two-sample deviation bound `2^{α+1} exp{1 − αt/(α+1)}`.
pub fn thm1_bound(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(domain("thm1_bound: alpha must be positive"));
    }
    if !(t >= 0.0) {
        return Err(domain("thm1_bound: t must be nonnegative"));
    }
    Ok(2f64.powf(alpha + 1.0) * (1.0 - alpha * t / (alpha + 1.0)).exp())
}

/// The α-optimized form `2 exp{1 − (√t − √log2)²}`, valid for t >= log 2.
pub fn thm1_optimized(t: f64) -> Result<f64> {
    if !(t >= LOG2) {
        return Err(domain("thm1_optimized: requires t >= log 2"));
    }
    let s = t.sqrt() - LOG2.sqrt();
    Ok(2.0 * (1.0 - s * s).exp())
}

/// Numerically minimizes `thm1_bound(α, t)` over α > 0 by golden section.
///
/// Returns `(alpha_star, min_value)`. The objective is log-convex in α+1, so
/// it is unimodal on the bracket [1e-6, 1e6].
pub fn thm1_exact_min(t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0) {
        return Err(domain("thm1_exact_min: t must be nonnegative"));
    }
    // Work with the log of the bound; same minimizer, better conditioning.
    let obj = |a: f64| (a + 1.0) * LOG2 + 1.0 - a * t / (a + 1.0);
    let (a_star, _) = golden_section(obj, 1e-6, 1e6, 1e-10);
    Ok((a_star, obj(a_star).exp()))
}

/// Golden-section minimization of a unimodal function on [lo, hi],
/// run until the bracket width drops below `tol`.
fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < f64::EPSILON * (1.0 + hi.abs()) {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Poisson-type tail `exp{−ev · h(r/ev)}` with `h(x) = (1+x)log(1+x) − x`.
pub fn poisson_tail(ev: f64, r: f64) -> Result<f64> {
    if !(ev > 0.0) {
        return Err(domain("poisson_tail: ev must be positive"));
    }
    if !(r >= 0.0) {
        return Err(domain("poisson_tail: r must be nonnegative"));
    }
    Ok((-ev * poisson_h(r / ev)).exp())
}

/// `h(x) = (1+x)log(1+x) − x`.
pub fn poisson_h(x: f64) -> f64 {
    (1.0 + x) * x.ln_1p() - x
}

/// Bernstein-form tail `exp{−r²/(2 ev + 2r/3)}`; dominates `poisson_tail`
/// since `h(x) >= x²/(2 + 2x/3)`.
pub fn bernstein_tail(ev: f64, r: f64) -> Result<f64> {
    if !(ev > 0.0) {
        return Err(domain("bernstein_tail: ev must be positive"));
    }
    if !(r >= 0.0) {
        return Err(domain("bernstein_tail: r must be nonnegative"));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    Ok((-r * r / (2.0 * ev + 2.0 * r / 3.0)).exp())
}

/// Deviation radius of the mixed uniform variance:
/// `(2b/3)·√(18 ev t + 4 b² t²) + 4 b² t / 3`.
pub fn variance_radius(ev: f64, b: f64, t: f64) -> Result<f64> {
    if !(ev >= 0.0) {
        return Err(domain("variance_radius: ev must be nonnegative"));
    }
    if !(b > 0.0) {
        return Err(domain("variance_radius: b must be positive"));
    }
    if !(t >= 0.0) {
        return Err(domain("variance_radius: t must be nonnegative"));
    }
    Ok(2.0 * b / 3.0 * (18.0 * ev * t + 4.0 * b * b * t * t).sqrt() + 4.0 * b * b * t / 3.0)
}

/// Two-sided deviation radius `2√(t(ev + variance_radius(ev, b, t)))`.
pub fn cor2_radius(ev: f64, b: f64, t: f64) -> Result<f64> {
    let vr = variance_radius(ev, b, t)?;
    Ok(2.0 * (t * (ev + vr)).sqrt())
}

/// Right-hand side companion of [`cor2_radius`]:
/// `4 e^{1−(√t−√log2)²} + e^{−t}`, valid for t >= log 2.
pub fn cor2_rhs(t: f64) -> Result<f64> {
    Ok(2.0 * thm1_optimized(t)? + (-t).exp())
}

/// Radius of the lower-tail inequality `2√(1.35 ev t) + 3.5 b t`.
pub fn massart_radius(ev: f64, b: f64, t: f64) -> Result<f64> {
    if !(ev >= 0.0 && b >= 0.0 && t >= 0.0) {
        return Err(domain("massart_radius: inputs must be nonnegative"));
    }
    Ok(2.0 * (1.35 * ev * t).sqrt() + 3.5 * b * t)
}

/// Polynomial packing bound for VC-subgraph classes: `e(d+1)(2e/u²)^d`.
pub fn haussler_packing_bound(d: u32, u: f64) -> Result<f64> {
    if d < 1 {
        return Err(domain("haussler_packing_bound: d must be >= 1"));
    }
    if !(u > 0.0) {
        return Err(domain("haussler_packing_bound: u must be positive"));
    }
    Ok(E * (d as f64 + 1.0) * (2.0 * E / (u * u)).powi(d as i32))
}

/// Normalized-deviation radius `K√(d log n / n) + √(t/n)`.
pub fn cor4_radius(d: u32, n: u32, t: f64, k: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain("cor4_radius: n must be >= 2"));
    }
    if d < 1 {
        return Err(domain("cor4_radius: d must be >= 1"));
    }
    if !(t >= 0.0) {
        return Err(domain("cor4_radius: t must be nonnegative"));
    }
    if !(k >= 0.0) {
        return Err(domain("cor4_radius: K must be nonnegative"));
    }
    let n = n as f64;
    Ok(k * (d as f64 * n.ln() / n).sqrt() + (t / n).sqrt())
}

/// Solves the normalized inequality for the plain deviation:
/// `2U√(var_sum / (1 − 4U²))`, requiring U < 1/2.
pub fn solved_radius(u: f64, var_sum: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(domain("solved_radius: U must be nonnegative"));
    }
    if u >= 0.5 {
        return Err(domain("solved_radius: requires U < 1/2"));
    }
    if !(var_sum >= 0.0) {
        return Err(domain("solved_radius: var_sum must be nonnegative"));
    }
    Ok(2.0 * u * (var_sum / (1.0 - 4.0 * u * u)).sqrt())
}

/// Empirical-Bernstein radius `2√(var_sum · t / (n − 4t))`, for t < n/4.
pub fn eb_radius(var_sum: f64, n: u32, t: f64) -> Result<f64> {
    if !(var_sum >= 0.0) {
        return Err(domain("eb_radius: var_sum must be nonnegative"));
    }
    if !(t >= 0.0) {
        return Err(domain("eb_radius: t must be nonnegative"));
    }
    let nf = n as f64;
    if t >= nf / 4.0 {
        return Err(domain("eb_radius: requires t < n/4"));
    }
    Ok(2.0 * (var_sum * t / (nf - 4.0 * t)).sqrt())
}

/// The classical "optimistic" VC radius `2√((d/n) log(2en/d) + t/n)`.
pub fn vc_optimistic_radius(d: u32, n: u32, t: f64) -> Result<f64> {
    if d < 1 {
        return Err(domain("vc_optimistic_radius: d must be >= 1"));
    }
    if d > n {
        return Err(domain("vc_optimistic_radius: requires d <= n"));
    }
    if !(t >= 0.0) {
        return Err(domain("vc_optimistic_radius: t must be nonnegative"));
    }
    let (d, n) = (d as f64, n as f64);
    Ok(2.0 * (d / n * (2.0 * E * n / d).ln() + t / n).sqrt())
}

/// Quantile-optimized tail `exp(1 − (√t − √log(1/β))²)`, for t >= log(1/β).
pub fn thm2_rhs(t: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(domain("thm2_rhs: beta must be in (0,1)"));
    }
    let lb = (1.0 / beta).ln();
    if !(t >= lb) {
        return Err(domain("thm2_rhs: requires t >= log(1/beta)"));
    }
    let s = t.sqrt() - lb.sqrt();
    Ok((1.0 - s * s).exp())
}
