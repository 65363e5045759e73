//! The convex-hull distance on the discrete cube {0,1}^n and exhaustive
//! verification of its tail inequality and control property.
//!
//! The distance `f_c(A, ε)` is the Euclidean norm of the minimum-norm point
//! of `conv U_A(ε)`. We never materialize `U_A(ε)` for the distance itself:
//! its convex hull is generated by the |A| disagreement indicators, since any
//! other member dominates one of them coordinatewise with all entries
//! nonnegative. The minimum-norm point is computed with Wolfe's method and
//! certified by the optimality gap `min_v <p, v − p> >= 0` over generators.

use crate::error::{domain, Error, Result};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

pub const MAX_DIM: usize = 24;
/// Exhaustive verifications enumerate all 2^n points.
pub const MAX_EXHAUSTIVE_DIM: usize = 12;

/// A point of {0,1}^n, n <= 24, stored as a bit mask (bit i = coordinate i).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    n: usize,
    mask: u32,
}

impl BitString {
    pub fn new(n: usize, mask: u32) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(domain(format!("BitString: dimension {n} out of range 1..={MAX_DIM}")));
        }
        if n < 32 && mask >> n != 0 {
            return Err(domain("BitString: mask has bits beyond the dimension"));
        }
        Ok(BitString { n, mask })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn bit(&self, i: usize) -> bool {
        self.mask >> i & 1 == 1
    }

    pub fn complement(&self) -> BitString {
        BitString {
            n: self.n,
            mask: !self.mask & ((1u32 << self.n) - 1),
        }
    }

    pub fn hamming(&self, other: &BitString) -> u32 {
        (self.mask ^ other.mask).count_ones()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        if n == 0 || n > MAX_DIM {
            return Err(domain(format!("BitString: length {n} out of range 1..={MAX_DIM}")));
        }
        let mut mask = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => mask |= 1 << i,
                '0' => {}
                _ => return Err(domain(format!("BitString: invalid character '{c}'"))),
            }
        }
        BitString::new(n, mask)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e: Error| D::Error::custom(e.to_string()))
    }
}

/// A nonempty subset of {0,1}^n with explicit members, duplicates forbidden.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeEvent {
    n: usize,
    members: Vec<u32>,
}

impl CubeEvent {
    pub fn new(members: Vec<BitString>) -> Result<Self> {
        if members.is_empty() {
            return Err(domain("CubeEvent: must be nonempty"));
        }
        let n = members[0].dim();
        if members.iter().any(|b| b.dim() != n) {
            return Err(domain("CubeEvent: members have mixed dimensions"));
        }
        let mut masks: Vec<u32> = members.iter().map(|b| b.mask()).collect();
        let len = masks.len();
        masks.sort_unstable();
        masks.dedup();
        if masks.len() != len {
            return Err(domain("CubeEvent: duplicate members forbidden"));
        }
        Ok(CubeEvent { n, members: masks })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn members(&self) -> impl Iterator<Item = BitString> + '_ {
        let n = self.n;
        self.members.iter().map(move |&m| BitString { n, mask: m })
    }

    pub fn contains(&self, eps: &BitString) -> bool {
        self.n == eps.dim() && self.members.binary_search(&eps.mask()).is_ok()
    }

    /// Probability of the event under the uniform measure.
    pub fn probability(&self) -> f64 {
        self.members.len() as f64 / (1u64 << self.n) as f64
    }

    pub fn is_subset_of(&self, other: &CubeEvent) -> bool {
        self.n == other.n && self.members.iter().all(|m| other.members.binary_search(m).is_ok())
    }
}

impl Serialize for CubeEvent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self.members().map(|b| b.to_string()).collect();
        strings.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CubeEvent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<BitString>::deserialize(d)?;
        CubeEvent::new(strings).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// The set `U_A(ε) = { s : s_i = 0 ⇒ ε'_i = ε_i for some ε' ∈ A }`,
/// i.e. the union over ε' ∈ A of the coordinatewise up-sets above the
/// disagreement indicator of (ε, ε'). Materialized only for definitional
/// tests at small n.
pub fn u_set(a: &CubeEvent, eps: &BitString) -> Result<Vec<BitString>> {
    if a.dim() != eps.dim() {
        return Err(domain("u_set: dimension mismatch"));
    }
    let n = eps.dim();
    if n > 16 {
        return Err(domain("u_set: materialization limited to n <= 16"));
    }
    let indicators: Vec<u32> = a.members.iter().map(|&m| m ^ eps.mask()).collect();
    let mut out = Vec::new();
    for s in 0..1u32 << n {
        if indicators.iter().any(|&d| d & !s == 0) {
            out.push(BitString { n, mask: s });
        }
    }
    Ok(out)
}

/// Result of a minimum-norm-point computation over the disagreement hull.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexDistanceResult {
    /// The convex distance `f_c(A, ε)`.
    pub fc: f64,
    /// The squared distance, kept separately so that exact integer values
    /// (vertex cases) are not perturbed by a sqrt round trip.
    pub fc_sq: f64,
    /// The minimum-norm point itself.
    pub point: Vec<f64>,
    /// Convex weights over members of A whose disagreement indicators
    /// reproduce `point` (indices into the event's sorted member list).
    pub witness: Vec<(usize, f64)>,
    /// `min_v <p, v − p>` over all generators v; >= 0 certifies optimality.
    pub certificate_gap: f64,
}

impl ConvexDistanceResult {
    pub fn fc_squared(&self) -> f64 {
        self.fc_sq
    }
}

fn mask_coord(m: u32, i: usize) -> f64 {
    (m >> i & 1) as f64
}

fn point_mask_dot(p: &[f64], m: u32) -> f64 {
    let mut acc = 0.0;
    let mut bits = m;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        acc += p[i];
        bits &= bits - 1;
    }
    acc
}

/// Computes `f_c(A, ε)` exactly via Wolfe's minimum-norm-point method over
/// the disagreement indicators `{ indicator(ε ≠ ε') : ε' ∈ A }`.
pub fn convex_distance(a: &CubeEvent, eps: &BitString) -> Result<ConvexDistanceResult> {
    if a.dim() != eps.dim() {
        return Err(domain("convex_distance: dimension mismatch"));
    }
    let n = eps.dim();
    let gens: Vec<u32> = a.members.iter().map(|&m| m ^ eps.mask()).collect();

    // Only coordinatewise-minimal indicators can carry weight in the
    // minimum-norm point: replacing a superset generator by its subset moves
    // the combination down coordinatewise without leaving the hull.
    let mut keep: Vec<usize> = Vec::new();
    'outer: for (k, &g) in gens.iter().enumerate() {
        for (j, &h) in gens.iter().enumerate() {
            if j != k && h & g == h && (h != g || j < k) {
                continue 'outer;
            }
        }
        keep.push(k);
    }
    let pruned: Vec<u32> = keep.iter().map(|&k| gens[k]).collect();

    let (point, weights, _) = wolfe_min_norm(&pruned, n);

    let norm_sq: f64 = point.iter().map(|v| v * v).sum();
    // Certify against every generator, not just the pruned ones.
    let certificate_gap = gens
        .iter()
        .map(|&g| point_mask_dot(&point, g) - norm_sq)
        .fold(f64::INFINITY, f64::min);

    let witness: Vec<(usize, f64)> = keep
        .iter()
        .zip(weights.iter())
        .filter(|(_, &w)| w > 0.0)
        .map(|(&k, &w)| (k, w))
        .collect();

    Ok(ConvexDistanceResult {
        fc: norm_sq.max(0.0).sqrt(),
        fc_sq: norm_sq.max(0.0),
        point,
        witness,
        certificate_gap,
    })
}

/// Wolfe's method for the minimum-norm point of the convex hull of 0/1
/// vertex masks. Returns the point, convex weights over `gens`, and the
/// final optimality gap over `gens`. Deterministic: ties break by index.
fn wolfe_min_norm(gens: &[u32], n: usize) -> (Vec<f64>, Vec<f64>, f64) {
    assert!(!gens.is_empty());
    // Start at the generator of minimal norm.
    let start = gens
        .iter()
        .enumerate()
        .min_by_key(|(i, g)| (g.count_ones(), *i))
        .map(|(i, _)| i)
        .unwrap();

    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut point: Vec<f64> = (0..n).map(|i| mask_coord(gens[start], i)).collect();

    let max_major = 8 * gens.len() + 64;
    for _ in 0..max_major {
        let norm_sq: f64 = point.iter().map(|v| v * v).sum();
        // Steepest descent vertex.
        let (best, best_dot) = gens
            .iter()
            .enumerate()
            .map(|(i, &g)| (i, point_mask_dot(&point, g)))
            .fold((usize::MAX, f64::INFINITY), |acc, (i, d)| {
                if d < acc.1 - 1e-15 {
                    (i, d)
                } else {
                    acc
                }
            });
        if best == usize::MAX || best_dot >= norm_sq - 1e-12 * (1.0 + norm_sq) {
            break;
        }
        if corral.contains(&best) {
            break; // numerical stall; the certificate below reports the truth
        }
        corral.push(best);
        weights.push(0.0);

        // Minor cycle: move to the affine minimizer, dropping vanishing
        // corral members along the way.
        loop {
            let Some(v) = affine_min_norm(gens, &corral) else {
                // Degenerate Gram system; drop the newest member and stop.
                corral.pop();
                weights.pop();
                break;
            };
            if v.iter().all(|&vi| vi > 1e-12) {
                weights = v;
                break;
            }
            let mut theta = 1.0f64;
            for (&wi, &vi) in weights.iter().zip(v.iter()) {
                if vi < 1e-12 && wi - vi > 1e-15 {
                    theta = theta.min(wi / (wi - vi));
                }
            }
            let mut next: Vec<f64> = weights
                .iter()
                .zip(v.iter())
                .map(|(&wi, &vi)| wi + theta * (vi - wi))
                .collect();
            // Drop members at (numerical) zero weight.
            let mut i = 0;
            while i < next.len() {
                if next[i] <= 1e-12 {
                    next.remove(i);
                    corral.remove(i);
                } else {
                    i += 1;
                }
            }
            let total: f64 = next.iter().sum();
            for w in &mut next {
                *w /= total;
            }
            weights = next;
            if weights.len() <= 1 {
                break;
            }
        }

        for i in 0..n {
            point[i] = corral
                .iter()
                .zip(weights.iter())
                .map(|(&g, &w)| w * mask_coord(gens[g], i))
                .sum();
        }
    }

    let norm_sq: f64 = point.iter().map(|v| v * v).sum();
    let gap = gens
        .iter()
        .map(|&g| point_mask_dot(&point, g) - norm_sq)
        .fold(f64::INFINITY, f64::min);

    let mut full = vec![0.0; gens.len()];
    for (&g, &w) in corral.iter().zip(weights.iter()) {
        full[g] += w;
    }
    (point, full, gap)
}

/// Minimum-norm point of the affine hull of the corral: solves the KKT
/// system `G v = λ1, Σv = 1` with the integer Gram matrix
/// `G_{ij} = |g_i ∧ g_j|`. Returns None if the system is singular.
fn affine_min_norm(gens: &[u32], corral: &[usize]) -> Option<Vec<f64>> {
    let k = corral.len();
    let dim = k + 1;
    let mut m = vec![0.0f64; dim * dim];
    let mut rhs = vec![0.0f64; dim];
    for (r, &gr) in corral.iter().enumerate() {
        for (c, &gc) in corral.iter().enumerate() {
            m[r * dim + c] = (gens[gr] & gens[gc]).count_ones() as f64;
        }
        m[r * dim + k] = 1.0;
        m[k * dim + r] = 1.0;
    }
    rhs[k] = 1.0;
    solve_dense(&mut m, &mut rhs, dim)?;
    rhs.truncate(k);
    Some(rhs)
}

/// In-place Gaussian elimination with partial pivoting.
fn solve_dense(m: &mut [f64], rhs: &mut [f64], dim: usize) -> Option<()> {
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&a, &b| m[a * dim + col].abs().total_cmp(&m[b * dim + col].abs()))
            .unwrap();
        if m[pivot * dim + col].abs() < 1e-10 {
            return None;
        }
        if pivot != col {
            for j in 0..dim {
                m.swap(col * dim + j, pivot * dim + j);
            }
            rhs.swap(col, pivot);
        }
        let diag = m[col * dim + col];
        for row in 0..dim {
            if row == col {
                continue;
            }
            let factor = m[row * dim + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for j in col..dim {
                m[row * dim + j] -= factor * m[col * dim + j];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    for col in 0..dim {
        rhs[col] /= m[col * dim + col];
    }
    Some(())
}

/// One row of an exhaustive tail check.
#[derive(Debug, Clone, Serialize)]
pub struct TailCheckRow {
    pub t: f64,
    pub probability: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Report of an exhaustive convex-distance tail verification.
#[derive(Debug, Clone, Serialize)]
pub struct Prop1Report {
    pub event_probability: f64,
    pub alpha: f64,
    pub rows: Vec<TailCheckRow>,
    pub ok: bool,
}

/// All `f_c²(A, ε)` over the full cube, indexed by the mask of ε.
pub fn all_fc_squared(a: &CubeEvent) -> Result<Vec<f64>> {
    let n = a.dim();
    if n > MAX_EXHAUSTIVE_DIM {
        return Err(domain(format!(
            "exhaustive convex-distance scan limited to n <= {MAX_EXHAUSTIVE_DIM}"
        )));
    }
    (0u32..1 << n)
        .into_par_iter()
        .map(|mask| {
            let eps = BitString { n, mask };
            convex_distance(a, &eps).map(|r| r.fc_squared())
        })
        .collect()
}

/// Exhaustively verifies the tail inequality
/// `P(f_c²(A, ε) >= t) <= P(A)^{−α} exp{−αt/(α+1)}` at each t in the grid.
pub fn prop1_verify(a: &CubeEvent, alpha: f64, t_grid: &[f64]) -> Result<Prop1Report> {
    if !(alpha > 0.0) {
        return Err(domain("prop1_verify: alpha must be positive"));
    }
    let fc2 = all_fc_squared(a)?;
    let total = fc2.len() as f64;
    let p_a = a.probability();
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut ok = true;
    for &t in t_grid {
        let probability = fc2.iter().filter(|&&v| v >= t).count() as f64 / total;
        let bound = p_a.powf(-alpha) * (-alpha * t / (alpha + 1.0)).exp();
        let slack = bound - probability;
        if slack < -1e-12 {
            ok = false;
        }
        rows.push(TailCheckRow {
            t,
            probability,
            bound,
            slack,
        });
    }
    Ok(Prop1Report {
        event_probability: p_a,
        alpha,
        rows,
        ok,
    })
}

/// Finds a control point: some ε' ∈ A with
/// `Σ λ_i 1(ε'_i ≠ ε_i) <= √(t Σ λ_i²)`, given `f_c²(A, ε) <= t`.
pub fn control_points(
    a: &CubeEvent,
    eps: &BitString,
    lambda: &[f64],
    t: f64,
) -> Result<BitString> {
    if a.dim() != eps.dim() || lambda.len() != eps.dim() {
        return Err(domain("control_points: dimension mismatch"));
    }
    if lambda.iter().any(|&l| l < 0.0) {
        return Err(domain("control_points: lambda must be nonnegative"));
    }
    if !(t >= 0.0) {
        return Err(domain("control_points: t must be nonnegative"));
    }
    let dist = convex_distance(a, eps)?;
    if dist.fc_squared() > t + 1e-9 {
        return Err(domain(format!(
            "control_points: precondition fc² <= t violated ({} > {t})",
            dist.fc_squared()
        )));
    }
    let rhs = (t * lambda.iter().map(|l| l * l).sum::<f64>()).sqrt();
    for member in a.members() {
        let diff = member.mask() ^ eps.mask();
        let lhs = point_mask_dot(lambda, diff);
        if lhs <= rhs + 1e-9 {
            return Ok(member);
        }
    }
    Err(Error::VerificationFailed(
        "control_points: no member satisfies the control inequality (implementation bug)".into(),
    ))
}

/// A supremum of affine functions on the cube:
/// `Φ(ε) = max_f (c_f + sign · Σ ε_i s_{f,i})`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AffineSupFunctional {
    pub offsets: Vec<f64>,
    pub slopes: Vec<Vec<f64>>,
    /// +1 encodes Φ, −1 encodes the reflected Φ'.
    pub sign: f64,
}

impl AffineSupFunctional {
    pub fn new(offsets: Vec<f64>, slopes: Vec<Vec<f64>>, sign: f64) -> Result<Self> {
        if offsets.is_empty() || offsets.len() != slopes.len() {
            return Err(domain("AffineSupFunctional: need matching nonempty offsets/slopes"));
        }
        let n = slopes[0].len();
        if slopes.iter().any(|s| s.len() != n) {
            return Err(domain("AffineSupFunctional: slope vectors of unequal length"));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(domain("AffineSupFunctional: sign must be ±1"));
        }
        Ok(AffineSupFunctional { offsets, slopes, sign })
    }

    pub fn dim(&self) -> usize {
        self.slopes[0].len()
    }

    /// The reflected functional with `c'_f = c_f + Σ_i s_{f,i}` and flipped
    /// sign, so that `Φ'(ε) = Φ(1 − ε)` exactly.
    pub fn complement(&self) -> AffineSupFunctional {
        AffineSupFunctional {
            offsets: self
                .offsets
                .iter()
                .zip(self.slopes.iter())
                .map(|(&c, s)| c + self.sign * s.iter().sum::<f64>())
                .collect(),
            slopes: self.slopes.clone(),
            sign: -self.sign,
        }
    }

    /// `(max_f Σ_i s_{f,i}²)^{1/2}`, a Lipschitz constant in the Euclidean
    /// metric on the cube.
    pub fn lipschitz(&self) -> f64 {
        self.slopes
            .iter()
            .map(|s| s.iter().map(|v| v * v).sum::<f64>())
            .fold(0.0f64, f64::max)
            .sqrt()
    }
}

/// Evaluates the affine supremum at a cube point.
pub fn sup_affine_eval(f: &AffineSupFunctional, eps: &BitString) -> Result<f64> {
    if f.dim() != eps.dim() {
        return Err(domain("sup_affine_eval: dimension mismatch"));
    }
    Ok(f.offsets
        .iter()
        .zip(f.slopes.iter())
        .map(|(&c, s)| c + f.sign * point_mask_dot(s, eps.mask()))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Report of the convex-Lipschitz tail verification around the median.
#[derive(Debug, Clone, Serialize)]
pub struct StarReport {
    pub median: f64,
    pub lipschitz: f64,
    pub alpha: f64,
    pub upper: Vec<TailCheckRow>,
    pub lower: Vec<TailCheckRow>,
    pub ok: bool,
}

/// Exhaustively checks the median-concentration tails
/// `P(Φ > M + L√t) <= 2^α exp{−αt/(α+1)}` and
/// `P(Φ' < M − L√t) <= 2^α exp{−αt/(α+1)}`.
pub fn star_tails_verify(
    f: &AffineSupFunctional,
    alpha: f64,
    t_grid: &[f64],
) -> Result<StarReport> {
    if !(alpha > 0.0) {
        return Err(domain("star_tails_verify: alpha must be positive"));
    }
    let n = f.dim();
    if n > MAX_EXHAUSTIVE_DIM {
        return Err(domain(format!(
            "star_tails_verify: exhaustive scan limited to n <= {MAX_EXHAUSTIVE_DIM}"
        )));
    }
    let fc = f.complement();
    let total = 1u32 << n;
    let mut phi = Vec::with_capacity(total as usize);
    let mut phi_prime = Vec::with_capacity(total as usize);
    for mask in 0..total {
        let eps = BitString { n, mask };
        phi.push(sup_affine_eval(f, &eps)?);
        phi_prime.push(sup_affine_eval(&fc, &eps)?);
    }
    let median = exact_median(&phi);
    let lipschitz = f.lipschitz();

    let totalf = total as f64;
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut ok = true;
    for &t in t_grid {
        if !(t >= 0.0) {
            return Err(domain("star_tails_verify: t must be nonnegative"));
        }
        let bound = 2f64.powf(alpha) * (-alpha * t / (alpha + 1.0)).exp();
        let shift = lipschitz * t.sqrt();

        // Strict comparisons: the closed-boundary form degenerates when the
        // Lipschitz constant vanishes (constant functionals put all mass
        // exactly at the median), while the strict events are bounded for
        // every t by the limiting argument.
        let p_up = phi.iter().filter(|&&v| v > median + shift).count() as f64 / totalf;
        let slack_up = bound - p_up;
        if slack_up < -1e-12 {
            ok = false;
        }
        upper.push(TailCheckRow {
            t,
            probability: p_up,
            bound,
            slack: slack_up,
        });

        let p_lo = phi_prime.iter().filter(|&&v| v < median - shift).count() as f64 / totalf;
        let slack_lo = bound - p_lo;
        if slack_lo < -1e-12 {
            ok = false;
        }
        lower.push(TailCheckRow {
            t,
            probability: p_lo,
            bound,
            slack: slack_lo,
        });
    }
    Ok(StarReport {
        median,
        lipschitz,
        alpha,
        upper,
        lower,
        ok,
    })
}

/// Smallest value m in the exact (uniform) distribution with
/// `P(X <= m) >= 1/2`.
pub fn exact_median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[(sorted.len() + 1) / 2 - 1]
}

/// The tail bound of the inequality under test, `P(A)^{−α} e^{−αt/(α+1)}`.
pub fn prop1_bound(p_a: f64, alpha: f64, t: f64) -> f64 {
    p_a.powf(-alpha) * (-alpha * t / (alpha + 1.0)).exp()
}
