//! Hinge-moment domination and tail transfer between a random variable and
//! its symmetrized counterpart, plus the variational square-root identity
//! that rewrites self-normalized deviation events.

use crate::bounds::ExpTail;
use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

/// A finite-support real law, given either as i.i.d. draws (uniform weights)
/// or as an explicit weighted support.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmpiricalSample {
    pub values: Vec<f64>,
    pub weights: Option<Vec<f64>>,
}

impl EmpiricalSample {
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("EmpiricalSample: values must be nonempty"));
        }
        Ok(EmpiricalSample { values, weights: None })
    }

    pub fn weighted(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("EmpiricalSample: values must be nonempty"));
        }
        if values.len() != weights.len() {
            return Err(domain("EmpiricalSample: values/weights length mismatch"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(domain("EmpiricalSample: weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!(
                "EmpiricalSample: weights sum to {total}, expected 1"
            )));
        }
        Ok(EmpiricalSample {
            values,
            weights: Some(weights),
        })
    }

    fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => 1.0 / self.values.len() as f64,
        }
    }

    /// Exact tail `P(X >= t)` of the finite-support law.
    pub fn tail(&self, t: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= t)
            .map(|(i, _)| self.weight(i))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| self.weight(i) * v)
            .sum()
    }
}

/// Expected hinge moment `E (X − a)₊` of a finite-support law.
pub fn hinge_moment(sample: &EmpiricalSample, a: f64) -> f64 {
    sample
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| sample.weight(i) * (v - a).max(0.0))
        .sum()
}

/// Result of checking `E(ξ−a)₊ <= E(ν−a)₊` across a grid of hinge offsets.
#[derive(Debug, Clone)]
pub struct HingeDomination {
    pub dominated: bool,
    /// Largest observed `E(ξ−a)₊ − E(ν−a)₊` over the grid.
    pub worst_gap: f64,
    /// Offset attaining the worst gap.
    pub worst_a: f64,
}

/// Checks hinge-moment domination of `xi` by `nu` on a grid of offsets.
///
/// Both hinge moments are piecewise linear in `a` with breakpoints exactly at
/// the sample values, so a grid containing every sample point certifies
/// domination for all real `a` (the moments are affine between breakpoints
/// and coincide with the affine tail `mean − a` to the left of the support).
pub fn hinge_dominates(
    xi: &EmpiricalSample,
    nu: &EmpiricalSample,
    a_grid: &[f64],
) -> Result<HingeDomination> {
    if a_grid.is_empty() {
        return Err(domain("hinge_dominates: empty offset grid"));
    }
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_a = a_grid[0];
    for &a in a_grid {
        let gap = hinge_moment(xi, a) - hinge_moment(nu, a);
        if gap > worst_gap {
            worst_gap = gap;
            worst_a = a;
        }
    }
    Ok(HingeDomination {
        dominated: worst_gap <= 1e-12,
        worst_gap,
        worst_a,
    })
}

/// Breakpoint grid for [`hinge_dominates`]: all sample values of both laws.
pub fn breakpoint_grid(xi: &EmpiricalSample, nu: &EmpiricalSample) -> Vec<f64> {
    let mut grid: Vec<f64> = xi.values.iter().chain(nu.values.iter()).copied().collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Transfers an exponential tail certificate through hinge domination:
/// the dominated variable satisfies the same-rate bound with the constant
/// inflated by a factor e.
pub fn transfer_tail(cert: &ExpTail) -> Result<ExpTail> {
    if cert.gamma_factor < 1.0 {
        return Err(domain("transfer_tail: requires gamma_factor >= 1"));
    }
    ExpTail::new(cert.gamma_factor * std::f64::consts::E, cert.rate)
}

/// The variational identity `√(ab) = inf_{δ>0} (δa + b/(4δ))`.
///
/// Returns the closed-form infimum together with the minimizer
/// `δ* = √b / (2√a)` when it is finite.
pub fn sqrt_variational(a: f64, b: f64) -> Result<(f64, Option<f64>)> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(domain("sqrt_variational: a and b must be nonnegative"));
    }
    let value = (a * b).sqrt();
    let argmin = if a > 0.0 && b > 0.0 {
        Some(b.sqrt() / (2.0 * a.sqrt()))
    } else {
        None
    };
    Ok((value, argmin))
}

/// The self-normalized statistic `sup_{δ>0} 4δ(ξ₁ − ξ₂ − δξ₃)`, in closed
/// form `(max(ξ₁ − ξ₂, 0))² / ξ₃`.
///
/// The event `{statistic >= t}` coincides with `{ξ₁ >= ξ₂ + √(ξ₃ t)}`.
pub fn normalized_statistic(xi1: f64, xi2: f64, xi3: f64) -> Result<f64> {
    if !(xi3 > 0.0) {
        return Err(domain("normalized_statistic: xi3 must be positive"));
    }
    let d = (xi1 - xi2).max(0.0);
    Ok(d * d / xi3)
}

/// Tightest constant Γ making `P(X >= t) <= Γ e^{−γt}` hold for all t >= 0,
/// for a finite-support law and a caller-chosen rate γ.
///
/// `P(X >= t) e^{γt}` is maximized over t >= 0 at a support point (or at 0),
/// so only those need to be inspected. The result is floored at 1 so it can
/// serve as a transfer hypothesis.
pub fn exp_tail_certificate(sample: &EmpiricalSample, rate: f64) -> Result<ExpTail> {
    if !(rate > 0.0) {
        return Err(domain("exp_tail_certificate: rate must be positive"));
    }
    let mut gamma_factor: f64 = sample.tail(0.0); // t = 0 endpoint
    for &v in &sample.values {
        if v >= 0.0 {
            gamma_factor = gamma_factor.max(sample.tail(v) * (rate * v).exp());
        }
    }
    ExpTail::new(gamma_factor.max(1.0), rate)
}
