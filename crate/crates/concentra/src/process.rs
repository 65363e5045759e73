//! Finite-support model of a probability space (Ω, μ), finite function
//! families ℱ, and the empirical-process functionals built from them:
//!
//! * `z_value`        — Z(x) = sup_ℱ Σᵢ f(xᵢ)
//! * `uniform_w`      — W = sup_ℱ Σᵢ (f(xᵢ) − f(yᵢ))²   (unnormalized)
//! * `uniform_v`      — V = 𝔼_y W, the mixed uniform variance
//! * `w_stat`/`v_stat`— the per-function, 4/n-normalized variants
//!   W f = (4/n) Σᵢ (f(yᵢ) − f(xᵢ))² and V f = 𝔼_y W f, the latter in
//!   closed form 4(Var f + Var_n f + (Pf − P_n f)²)
//! * `moments`        — Pf, P_n f, Var f, Var_n f, Q_n f (both directions)
//! * `s_n`/`r_n`      — the two-sample averages and their Bernoulli-signed
//!   randomization
//!
//! The ground space is finite and indexed {0,…,m−1}; real-valued spaces are
//! represented by grids so that Pf, Var f, and all enumerations are exact.
//!
//! Note: the unnormalized sup-level W and the per-function W f are distinct
//! operations with distinct names even though the source material reuses the
//! letter W for both.

use crate::cube::BitString;
use crate::error::{domain, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A probability measure on the finite ground space {0,…,m−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    /// Builds a distribution, checking nonnegativity and normalization
    /// (sum within 1e-12 of 1).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(domain("distribution must have at least one ground point"));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(domain("probabilities must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!(
                "probabilities sum to {total}, expected 1 within 1e-12"
            )));
        }
        Ok(FiniteDistribution { probs })
    }

    /// The uniform distribution on m points.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(domain("ground space must be nonempty"));
        }
        Ok(FiniteDistribution {
            probs: vec![1.0 / m as f64; m],
        })
    }

    /// Bernoulli(q) as a two-point law on {0, 1} with P({1}) = q.
    pub fn bernoulli(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(domain("Bernoulli parameter must lie in [0,1]"));
        }
        Ok(FiniteDistribution {
            probs: vec![1.0 - q, q],
        })
    }

    /// Number of ground points m.
    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// P({point}).
    pub fn prob(&self, point: usize) -> f64 {
        self.probs[point]
    }

    /// Draws one ground point by inverse transform over the cumulative
    /// weights (deterministic given the RNG state).
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

/// A finite family of real-valued functions on the ground space, stored as
/// a matrix values[function][ground point]. `bound_b` declares a uniform
/// bound |f| ≤ b; `vc_dim` declares a VC dimension for the subgraph class.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionFamily {
    values: Vec<Vec<f64>>,
    bound_b: Option<f64>,
    vc_dim: Option<u32>,
}

/// JSON wire form shared by `FunctionFamily` and `FiniteDistribution`:
/// `{"probs":[...], "values":[[...],...], "b":…, "vc_dim":…}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub probs: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vc_dim: Option<u32>,
}

impl FunctionFamily {
    /// Builds a family, checking shape and the declared bound.
    pub fn new(values: Vec<Vec<f64>>, bound_b: Option<f64>, vc_dim: Option<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("function family must be nonempty"));
        }
        let m = values[0].len();
        if m == 0 {
            return Err(domain("functions must be defined on a nonempty ground space"));
        }
        if values.iter().any(|row| row.len() != m) {
            return Err(domain("all functions must share the same ground space"));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(domain("function values must be finite"));
        }
        if let Some(b) = bound_b {
            if b <= 0.0 {
                return Err(domain("bound b must be positive"));
            }
            if values.iter().flatten().any(|&v| v.abs() > b + 1e-12) {
                return Err(domain(format!("function values exceed declared bound b = {b}")));
            }
        }
        if vc_dim == Some(0) {
            return Err(domain("declared VC dimension must be positive"));
        }
        Ok(FunctionFamily {
            values,
            bound_b,
            vc_dim,
        })
    }

    /// Parses the JSON document form, returning the family and the measure.
    pub fn from_document(doc: &FamilyDocument) -> Result<(Self, FiniteDistribution)> {
        let mu = FiniteDistribution::new(doc.probs.clone())?;
        let family = FunctionFamily::new(doc.values.clone(), doc.b, doc.vc_dim)?;
        if family.m() != mu.m() {
            return Err(domain(format!(
                "family is defined on {} points but the measure has {}",
                family.m(),
                mu.m()
            )));
        }
        Ok((family, mu))
    }

    /// Serializes family + measure into the JSON document form.
    pub fn to_document(&self, mu: &FiniteDistribution) -> FamilyDocument {
        FamilyDocument {
            probs: mu.probs().to_vec(),
            values: self.values.clone(),
            b: self.bound_b,
            vc_dim: self.vc_dim,
        }
    }

    /// Number of functions |ℱ|.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Ground-space size m.
    pub fn m(&self) -> usize {
        self.values[0].len()
    }

    pub fn bound_b(&self) -> Option<f64> {
        self.bound_b
    }

    pub fn vc_dim(&self) -> Option<u32> {
        self.vc_dim
    }

    /// Row of values for function `f`.
    pub fn values_of(&self, f: usize) -> &[f64] {
        &self.values[f]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Index of a zero row (all entries 0), if present.
    pub fn zero_index(&self) -> Option<usize> {
        self.values
            .iter()
            .position(|row| row.iter().all(|&v| v == 0.0))
    }

    /// Errors unless the family contains the zero function (the standing
    /// assumption of the chaining construction).
    pub fn require_zero(&self) -> Result<usize> {
        self.zero_index()
            .ok_or_else(|| domain("family must contain the zero function"))
    }
}

/// A sample x = (x₁,…,x_n) of ground-point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    points: Vec<usize>,
}

impl Sample {
    pub fn new(points: Vec<usize>, m: usize) -> Result<Self> {
        if points.iter().any(|&p| p >= m) {
            return Err(domain("sample point outside ground space"));
        }
        Ok(Sample { points })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// Draws an i.i.d. sample of size n from μ.
    pub fn draw<R: Rng>(mu: &FiniteDistribution, n: usize, rng: &mut R) -> Self {
        Sample {
            points: (0..n).map(|_| mu.sample_point(rng)).collect(),
        }
    }
}

/// Two samples of equal length (the two independent copies used by
/// symmetrization).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedSample {
    pub x: Sample,
    pub y: Sample,
}

impl PairedSample {
    pub fn new(x: Sample, y: Sample) -> Result<Self> {
        if x.n() != y.n() {
            return Err(domain("paired samples must have equal lengths"));
        }
        Ok(PairedSample { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }
}

/// Decodes atom index `a` ∈ [0, m^n) into a sample over {0,…,m−1}^n
/// (least-significant digit first) together with its product weight.
pub fn decode_atom(a: u64, m: usize, n: usize, mu: &FiniteDistribution) -> (Sample, f64) {
    let mut rest = a;
    let mut points = Vec::with_capacity(n);
    let mut weight = 1.0;
    for _ in 0..n {
        let digit = (rest % m as u64) as usize;
        rest /= m as u64;
        weight *= mu.prob(digit);
        points.push(digit);
    }
    (Sample { points }, weight)
}

/// Z(x) = sup_{f∈ℱ} Σᵢ f(xᵢ).
pub fn z_value(family: &FunctionFamily, x: &Sample) -> f64 {
    family
        .rows()
        .iter()
        .map(|row| x.points().iter().map(|&p| row[p]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// W = sup_{f∈ℱ} Σᵢ (f(xᵢ) − f(yᵢ))², the unnormalized two-sample sup.
pub fn uniform_w(family: &FunctionFamily, pair: &PairedSample) -> f64 {
    family
        .rows()
        .iter()
        .map(|row| {
            pair.x
                .points()
                .iter()
                .zip(pair.y.points())
                .map(|(&xi, &yi)| {
                    let d = row[xi] - row[yi];
                    d * d
                })
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// How `uniform_v` is computed: exactly by y-enumeration or by seeded
/// Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Mc { trials: u64, seed: u64 },
}

/// Value of `uniform_v`, with a standard-error estimate in MC mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformV {
    pub value: f64,
    /// `Some` in MC mode only.
    pub stderr: Option<f64>,
}

/// V(x) = 𝔼_y sup_f Σᵢ (f(xᵢ) − f(yᵢ))², the mixed uniform variance.
///
/// Exact mode enumerates y ∈ Ω^n with product weights and requires
/// m^n ≤ `budget`; MC mode averages over seeded i.i.d. y-draws.
pub fn uniform_v(
    family: &FunctionFamily,
    x: &Sample,
    mu: &FiniteDistribution,
    mode: EvalMode,
    budget: u128,
) -> Result<UniformV> {
    let m = mu.m();
    let n = x.n();
    match mode {
        EvalMode::Exact => {
            let atoms = (m as u128).checked_pow(n as u32).ok_or_else(|| {
                domain("m^n overflows; use mc mode")
            })?;
            if atoms > budget {
                return Err(crate::Error::Budget {
                    needed: atoms,
                    budget,
                });
            }
            let mut total = 0.0;
            for a in 0..atoms as u64 {
                let (y, weight) = decode_atom(a, m, n, mu);
                if weight == 0.0 {
                    continue;
                }
                let pair = PairedSample {
                    x: x.clone(),
                    y,
                };
                total += weight * uniform_w(family, &pair);
            }
            Ok(UniformV {
                value: total,
                stderr: None,
            })
        }
        EvalMode::Mc { trials, seed } => {
            if trials == 0 {
                return Err(domain("mc mode requires at least one trial"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..trials {
                let y = Sample::draw(mu, n, &mut rng);
                let pair = PairedSample {
                    x: x.clone(),
                    y,
                };
                let w = uniform_w(family, &pair);
                sum += w;
                sum_sq += w * w;
            }
            let mean = sum / trials as f64;
            let var = (sum_sq / trials as f64 - mean * mean).max(0.0);
            Ok(UniformV {
                value: mean,
                stderr: Some((var / trials as f64).sqrt()),
            })
        }
    }
}

/// W f = (4/n) Σᵢ (f(yᵢ) − f(xᵢ))², the per-function normalized statistic.
pub fn w_stat(family: &FunctionFamily, f: usize, pair: &PairedSample) -> f64 {
    let row = family.values_of(f);
    let n = pair.n();
    let sum: f64 = pair
        .x
        .points()
        .iter()
        .zip(pair.y.points())
        .map(|(&xi, &yi)| {
            let d = row[yi] - row[xi];
            d * d
        })
        .sum();
    4.0 * sum / n as f64
}

/// All five per-function moments: Pf, P_n f, Var f, Var_n f, and Q_n f in
/// both sign conventions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// Pf = ∫ f dμ.
    pub p: f64,
    /// P_n f = (1/n) Σ f(xᵢ).
    pub p_n: f64,
    /// Var f under μ.
    pub var: f64,
    /// Var_n f = (1/n) Σ (P_n f − f(xᵢ))².
    pub var_n: f64,
    /// Q_n f = Pf − P_n f.
    pub q_n: f64,
    /// The opposite direction P_n f − Pf.
    pub q_n_rev: f64,
}

/// Computes the five scalars of `Moments` exactly against the finite
/// distribution.
pub fn moments(family: &FunctionFamily, f: usize, x: &Sample, mu: &FiniteDistribution) -> Moments {
    let row = family.values_of(f);
    let p: f64 = row.iter().zip(mu.probs()).map(|(&v, &w)| v * w).sum();
    let second: f64 = row.iter().zip(mu.probs()).map(|(&v, &w)| v * v * w).sum();
    let var = (second - p * p).max(0.0);
    let n = x.n() as f64;
    let p_n: f64 = x.points().iter().map(|&pt| row[pt]).sum::<f64>() / n;
    let var_n: f64 = x
        .points()
        .iter()
        .map(|&pt| {
            let d = p_n - row[pt];
            d * d
        })
        .sum::<f64>()
        / n;
    Moments {
        p,
        p_n,
        var,
        var_n,
        q_n: p - p_n,
        q_n_rev: p_n - p,
    }
}

/// V f = 𝔼_y W(f,x,y), in the closed form
/// 4(Var f + Var_n f + (Pf − P_n f)²).
pub fn v_stat(family: &FunctionFamily, f: usize, x: &Sample, mu: &FiniteDistribution) -> f64 {
    let m = moments(family, f, x, mu);
    4.0 * (m.var + m.var_n + m.q_n * m.q_n)
}

/// V f by literal 𝔼_y enumeration over Ω^n — the independent oracle for
/// the closed form. Cost m^n; small instances only.
pub fn v_stat_enumerated(
    family: &FunctionFamily,
    f: usize,
    x: &Sample,
    mu: &FiniteDistribution,
) -> f64 {
    let m = mu.m();
    let n = x.n();
    let atoms = (m as u64).pow(n as u32);
    let mut total = 0.0;
    for a in 0..atoms {
        let (y, weight) = decode_atom(a, m, n, mu);
        if weight == 0.0 {
            continue;
        }
        let pair = PairedSample { x: x.clone(), y };
        total += weight * w_stat(family, f, &pair);
    }
    total
}

/// S_n f = (1/n) Σᵢ (f(yᵢ) − f(xᵢ)).
pub fn s_n(family: &FunctionFamily, f: usize, pair: &PairedSample) -> f64 {
    let row = family.values_of(f);
    let sum: f64 = pair
        .x
        .points()
        .iter()
        .zip(pair.y.points())
        .map(|(&xi, &yi)| row[yi] - row[xi])
        .sum();
    sum / pair.n() as f64
}

/// R_n f = (1/n) Σᵢ εᵢ (f(yᵢ) − f(xᵢ)) with ε ∈ {0,1}^n encoded as a
/// bit string (bit i set ⇔ εᵢ = 1).
pub fn r_n(family: &FunctionFamily, f: usize, pair: &PairedSample, eps: &BitString) -> Result<f64> {
    if eps.dim() != pair.n() {
        return Err(domain("sign vector length must match sample length"));
    }
    let row = family.values_of(f);
    let sum: f64 = pair
        .x
        .points()
        .iter()
        .zip(pair.y.points())
        .enumerate()
        .filter(|(i, _)| eps.bit(*i))
        .map(|(_, (&xi, &yi))| row[yi] - row[xi])
        .sum();
    Ok(sum / pair.n() as f64)
}

/// Family generators for experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    /// Seeded values uniform in [−b, b].
    FiniteRandom { count: usize, b: f64 },
    /// Threshold indicators {1(ω ≤ θ)} over all grid thresholds plus the
    /// zero function; VC dimension 1.
    Threshold,
    /// Indicators of grid intervals [a, b] plus the zero function;
    /// VC dimension 2.
    Interval,
}

/// Builds a `FunctionFamily` on an m-point grid.
///
/// * threshold: m indicator functions 1(ω ≤ θ) for θ = 0,…,m−1 plus the
///   zero function (m + 1 rows), declared bound 1, VC dimension 1.
/// * interval: indicators of all intervals [a,b] ⊆ {0,…,m−1} plus zero,
///   declared bound 1, VC dimension 2.
/// * finite-random: `count` rows seeded uniform in [−b, b].
pub fn family_generators(kind: FamilyKind, m: usize, seed: u64) -> Result<FunctionFamily> {
    if m == 0 {
        return Err(domain("grid size must be at least 1"));
    }
    match kind {
        FamilyKind::Threshold => {
            let mut rows = vec![vec![0.0; m]];
            for theta in 0..m {
                rows.push((0..m).map(|w| if w <= theta { 1.0 } else { 0.0 }).collect());
            }
            FunctionFamily::new(rows, Some(1.0), Some(1))
        }
        FamilyKind::Interval => {
            let mut rows = vec![vec![0.0; m]];
            for a in 0..m {
                for b in a..m {
                    rows.push(
                        (0..m)
                            .map(|w| if w >= a && w <= b { 1.0 } else { 0.0 })
                            .collect(),
                    );
                }
            }
            FunctionFamily::new(rows, Some(1.0), Some(2))
        }
        FamilyKind::FiniteRandom { count, b } => {
            if count == 0 {
                return Err(domain("finite-random family needs at least one function"));
            }
            if b <= 0.0 {
                return Err(domain("bound b must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows = (0..count)
                .map(|_| (0..m).map(|_| rng.gen_range(-b..=b)).collect())
                .collect();
            FunctionFamily::new(rows, Some(b), None)
        }
    }
}
