//! Chaining machinery: the data-dependent metric d_{x,y}, packing numbers
//! D(ℱ,u,d) with exact (branch-and-bound) and greedy modes, exact entropy
//! integrals of the step function u ↦ √(log D(u)), the constant
//! K(β) = 8√(p+2) with Σ_{j≥2} j^{−p} < 1−β, the full nested-net /
//! projection construction with level increments Δ_j and level integrals
//! I_j, the functional
//!
//!   Φ(f,x,y) = K(β) n^{−1/2} ∫₀^{√(Wf)/2} √(log D(ℱ,u,d_{x,y})) du,
//!
//! the probabilistic condition
//!
//!   (Phi):  P_ε( sup_ℱ (R_n f − Φ(f,x,y)) > 0 ) < 1 − β,
//!
//! and the uniform-entropy upper bound on 𝔼_y Φ.
//!
//! Everything operates on the difference representation
//! F = {(f(y₁)−f(x₁),…,f(y_n)−f(x_n))} with the normalized Euclidean
//! metric d(f,g) = ((1/n)Σ(fᵢ−gᵢ)²)^{1/2}; duplicate difference vectors
//! (pseudometric collisions) are deduplicated before net construction and
//! suprema are taken over representatives.

use crate::bounds;
use crate::cube::BitString;
use crate::error::{domain, Result};
use crate::process::{r_n, v_stat, FiniteDistribution, FunctionFamily, PairedSample, Sample};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// d_{x,y}(f,g) = ((1/n) Σᵢ (f(yᵢ)−f(xᵢ)−g(yᵢ)+g(xᵢ))²)^{1/2}.
///
/// A pseudometric on the family: it can vanish for f ≠ g.
pub fn dxy_metric(family: &FunctionFamily, f: usize, g: usize, pair: &PairedSample) -> f64 {
    let rf = family.values_of(f);
    let rg = family.values_of(g);
    let n = pair.n();
    let sum: f64 = pair
        .x
        .points()
        .iter()
        .zip(pair.y.points())
        .map(|(&xi, &yi)| {
            let d = rf[yi] - rf[xi] - (rg[yi] - rg[xi]);
            d * d
        })
        .sum();
    (sum / n as f64).sqrt()
}

/// The deduplicated difference representation of a family on a fixed pair:
/// representative vectors (f(yᵢ)−f(xᵢ))ᵢ with, for each representative,
/// the list of original function indices that collapse onto it.
#[derive(Debug, Clone)]
pub struct DifferenceSet {
    reps: Vec<Vec<f64>>,
    owners: Vec<Vec<usize>>,
    /// For each original function, its representative index.
    rep_of: Vec<usize>,
    n: usize,
}

impl DifferenceSet {
    /// Builds the difference set; representatives are ordered by the
    /// smallest original function index that maps to them.
    pub fn from_family(family: &FunctionFamily, pair: &PairedSample) -> Result<Self> {
        if pair.n() == 0 {
            return Err(domain("paired sample must be nonempty"));
        }
        let n = pair.n();
        let mut reps: Vec<Vec<f64>> = Vec::new();
        let mut owners: Vec<Vec<usize>> = Vec::new();
        let mut rep_of = Vec::with_capacity(family.len());
        for f in 0..family.len() {
            let row = family.values_of(f);
            let vec: Vec<f64> = pair
                .x
                .points()
                .iter()
                .zip(pair.y.points())
                .map(|(&xi, &yi)| row[yi] - row[xi])
                .collect();
            match reps.iter().position(|r| r == &vec) {
                Some(i) => {
                    owners[i].push(f);
                    rep_of.push(i);
                }
                None => {
                    reps.push(vec);
                    owners.push(vec![f]);
                    rep_of.push(reps.len() - 1);
                }
            }
        }
        Ok(DifferenceSet {
            reps,
            owners,
            rep_of,
            n,
        })
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rep_of(&self, f: usize) -> usize {
        self.rep_of[f]
    }

    pub fn owners(&self, rep: usize) -> &[usize] {
        &self.owners[rep]
    }

    pub fn rep(&self, i: usize) -> &[f64] {
        &self.reps[i]
    }

    /// Index of the zero vector among the representatives, if present.
    pub fn zero_rep(&self) -> Option<usize> {
        self.reps.iter().position(|r| r.iter().all(|&v| v == 0.0))
    }

    /// d(i, j) between representatives.
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        let sum: f64 = self.reps[i]
            .iter()
            .zip(&self.reps[j])
            .map(|(&a, &b)| {
                let d = a - b;
                d * d
            })
            .sum();
        (sum / self.n as f64).sqrt()
    }

    /// d(i, 0-vector) — defined even when zero is not a member.
    pub fn dist_to_zero(&self, i: usize) -> f64 {
        let sum: f64 = self.reps[i].iter().map(|&a| a * a).sum();
        (sum / self.n as f64).sqrt()
    }

    /// Full symmetric distance matrix.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let k = self.len();
        let mut d = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let v = self.dist(i, j);
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        d
    }
}

/// Packing-number computation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingMode {
    /// True maximum u-separated set via branch-and-bound (≤ 20 points).
    Exact,
    /// Maximal (inclusion-wise) set by deterministic index-order insertion.
    Greedy,
}

/// A u-separated subset: `count` = |witness|; `exact` records whether the
/// count is the true maximum or merely a greedy maximal value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackingResult {
    pub count: usize,
    pub witness: Vec<usize>,
    pub exact: bool,
}

/// Maximum number of points the exact branch-and-bound accepts.
pub const MAX_EXACT_PACKING: usize = 20;

/// Packing number D(u): the maximal cardinality of a subset with pairwise
/// distances strictly greater than u. `dist` is the symmetric matrix.
pub fn packing_number(dist: &[Vec<f64>], u: f64, mode: PackingMode) -> Result<PackingResult> {
    if u <= 0.0 {
        return Err(domain("packing scale u must be positive"));
    }
    let k = dist.len();
    if k == 0 {
        return Err(domain("packing requires at least one point"));
    }
    match mode {
        PackingMode::Greedy => {
            let mut witness: Vec<usize> = Vec::new();
            for i in 0..k {
                if witness.iter().all(|&j| dist[i][j] > u) {
                    witness.push(i);
                }
            }
            Ok(PackingResult {
                count: witness.len(),
                witness,
                exact: false,
            })
        }
        PackingMode::Exact => {
            if k > MAX_EXACT_PACKING {
                return Err(domain(format!(
                    "exact packing limited to {MAX_EXACT_PACKING} points, got {k}"
                )));
            }
            // Maximum clique on the "separated" graph (edge ⇔ dist > u),
            // by branch-and-bound over candidate sets in index order.
            let adj: Vec<u32> = (0..k)
                .map(|i| {
                    let mut m = 0u32;
                    for j in 0..k {
                        if j != i && dist[i][j] > u {
                            m |= 1 << j;
                        }
                    }
                    m
                })
                .collect();
            let mut best: Vec<usize> = Vec::new();
            let mut current: Vec<usize> = Vec::new();
            fn expand(
                adj: &[u32],
                mut candidates: u32,
                current: &mut Vec<usize>,
                best: &mut Vec<usize>,
            ) {
                if current.len() + candidates.count_ones() as usize <= best.len() {
                    return;
                }
                if candidates == 0 {
                    if current.len() > best.len() {
                        *best = current.clone();
                    }
                    return;
                }
                while candidates != 0 {
                    if current.len() + candidates.count_ones() as usize <= best.len() {
                        return;
                    }
                    let v = candidates.trailing_zeros() as usize;
                    candidates &= !(1 << v);
                    current.push(v);
                    expand(adj, candidates & adj[v], current, best);
                    current.pop();
                }
            }
            let all = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
            expand(&adj, all, &mut current, &mut best);
            best.sort_unstable();
            Ok(PackingResult {
                count: best.len(),
                witness: best,
                exact: true,
            })
        }
    }
}

/// Sorted distinct positive pairwise distances — the breakpoints of the
/// step function u ↦ D(u).
fn breakpoints(dist: &[Vec<f64>]) -> Vec<f64> {
    let k = dist.len();
    let mut b: Vec<f64> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if dist[i][j] > 0.0 {
                b.push(dist[i][j]);
            }
        }
    }
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    b.dedup();
    b
}

/// ∫₀^upper √(log D(u)) du, computed exactly: D(u) is constant on the
/// intervals between consecutive pairwise distances (right-continuous,
/// since separation requires distance strictly greater than u), so the
/// integral is a finite sum of width × √(log D) terms. Intervals with
/// D = 1 contribute 0.
pub fn entropy_integral(dist: &[Vec<f64>], upper: f64, mode: PackingMode) -> Result<f64> {
    if upper <= 0.0 {
        return Err(domain("integration upper limit must be positive"));
    }
    entropy_integral_between(dist, 0.0, upper, mode)
}

/// ∫_lo^hi √(log D(u)) du over the same exact step function.
pub fn entropy_integral_between(
    dist: &[Vec<f64>],
    lo: f64,
    hi: f64,
    mode: PackingMode,
) -> Result<f64> {
    if lo < 0.0 || hi < lo {
        return Err(domain("integration limits must satisfy 0 ≤ lo ≤ hi"));
    }
    if hi == lo {
        return Ok(0.0);
    }
    // D(u) for u ∈ [bₖ, bₖ₊₁) equals its value at u = bₖ (for b₀ = 0 we
    // evaluate just inside the interval: separation at u → 0⁺ counts the
    // distinct points).
    let mut edges = vec![lo];
    for &b in &breakpoints(dist) {
        if b > lo && b < hi {
            edges.push(b);
        }
    }
    edges.push(hi);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        // Evaluation point inside [a, b): u = a works except at a = 0,
        // where any u in (0, b) gives the same count; use the midpoint.
        let u = if a > 0.0 { a } else { (a + b) / 2.0 };
        let d = packing_number(dist, u, mode)?.count;
        if d > 1 {
            total += (b - a) * (d as f64).ln().sqrt();
        }
    }
    Ok(total)
}

/// The chaining constant: K(β) = 8√(p+2) where p is the minimal real with
/// Σ_{j≥2} j^{−p} < 1 − β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KBeta {
    pub p: f64,
    pub k: f64,
}

/// Certified upper bound on Σ_{j≥2} j^{−p}: partial sum to J plus the
/// midpoint-rule tail Σ_{j>J} j^{−p} ≤ ∫_{J+1/2}^∞ x^{−p} dx =
/// (J+1/2)^{1−p}/(p−1), valid because x ↦ x^{−p} is convex. The bound's
/// overshoot is below 1e-12 for the p values the bisection certifies.
fn zeta_tail_upper(p: f64) -> f64 {
    let j_max: u64 = 100_000;
    // Sum smallest terms first for accuracy.
    let mut partial = 0.0;
    for j in (2..=j_max).rev() {
        partial += (j as f64).powf(-p);
    }
    partial + (j_max as f64 + 0.5).powf(1.0 - p) / (p - 1.0)
}

/// Computes (p, K(β)) by bisection on the certified upper bound of the
/// zeta sum: p is minimal (within 1e-9) with Σ_{j≥2} j^{−p} < 1 − β.
pub fn k_beta(beta: f64) -> Result<KBeta> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(domain("beta must lie in (0,1)"));
    }
    let target = 1.0 - beta;
    let mut lo = 1.3;
    if zeta_tail_upper(lo) < target {
        // Even p = 1.3 already satisfies the sum bound.
        return Ok(KBeta {
            p: lo,
            k: 8.0 * (lo + 2.0).sqrt(),
        });
    }
    let mut hi = 2.0;
    while zeta_tail_upper(hi) >= target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(domain("beta too close to 1"));
        }
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if zeta_tail_upper(mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Return the certified side (sum strictly below 1−β).
    let p = hi;
    Ok(KBeta {
        p,
        k: 8.0 * (p + 2.0).sqrt(),
    })
}

/// One level of the chaining construction.
#[derive(Debug, Clone, Serialize)]
pub struct ChainLevel {
    /// Dyadic level index j (scale 2^{−j}); may be negative.
    pub j: i64,
    /// Net F_j as representative indices, in insertion order.
    pub net: Vec<usize>,
    /// Packing number D(2^{−j}).
    pub packing: usize,
    /// True when D(2^{−j}) = D(2^{−j+1}); the proof sets Δ_j = {0} here.
    pub frozen: bool,
    /// Δ_j as pairs (g ∈ F_j, h ∈ F_{j−1}) with d(g,h) ≤ 2^{−j+2}.
    pub delta_pairs: Vec<(usize, usize)>,
    /// I_j = n^{−1/2} ∫_{2^{−j−1}}^{2^{−j}} √(log D(u)) du.
    pub i_j: f64,
}

/// The full nested-net construction over the difference representation.
#[derive(Debug, Clone, Serialize)]
pub struct ChainingStructure {
    /// j₀ = inf{j : D(2^{−j}) ≥ 2}; `None` when D never reaches 2 (all
    /// difference vectors coincide).
    pub j0: Option<i64>,
    pub levels: Vec<ChainLevel>,
    /// projections[rep][level index into `levels`] = representative index
    /// of π_j(rep). Levels below j₀ project everything to zero.
    pub projections: Vec<Vec<usize>>,
    /// Whether packing numbers were computed exactly.
    pub packing_exact: bool,
}

fn scale(j: i64) -> f64 {
    2f64.powi(-(j as i32))
}

/// Builds the nets, projections, Δ_j sets, and level integrals of the
/// chaining construction for a family containing the zero function.
///
/// Nets are grown greedily and incrementally (so F_{j−1} ⊆ F_j) with
/// index-order insertion; each F_j is 2^{−j}-separated and 2^{−j}-covering
/// by maximality. Projections follow the proof: a vector f with
/// d(f,0) ∈ (2^{−j−1}, 2^{−j}] gets π_k = 0 for k ≤ j and the nearest net
/// point (ties by smallest representative index) thereafter; when
/// F_k = F_{k+1} the deterministic nearest-point rule automatically picks
/// π_k(f) = π_{k+1}(f). Construction runs until the net contains every
/// distinct vector and every projection chain has stabilized.
pub fn build_chaining(
    family: &FunctionFamily,
    pair: &PairedSample,
    _beta: f64,
) -> Result<ChainingStructure> {
    family.require_zero()?;
    let diff = DifferenceSet::from_family(family, pair)?;
    let zero = diff
        .zero_rep()
        .expect("zero function implies zero difference vector");
    let dist = diff.distance_matrix();
    let k = diff.len();
    let n = diff.n() as f64;
    let mode = if k <= MAX_EXACT_PACKING {
        PackingMode::Exact
    } else {
        PackingMode::Greedy
    };

    let d_max = dist
        .iter()
        .flatten()
        .cloned()
        .fold(0.0f64, f64::max);
    if d_max == 0.0 {
        // Single distinct vector: D(u) = 1 for all u, j₀ undefined.
        return Ok(ChainingStructure {
            j0: None,
            levels: Vec::new(),
            projections: vec![Vec::new(); k],
            packing_exact: mode == PackingMode::Exact,
        });
    }

    // j₀ = smallest j with 2^{−j} < d_max (then D(2^{−j}) ≥ 2).
    let mut j0 = (-d_max.log2()).floor() as i64;
    while scale(j0) >= d_max {
        j0 += 1;
    }
    while j0 > i64::MIN + 1 && scale(j0 - 1) < d_max {
        j0 -= 1;
    }

    // Level for each nonzero vector: d(f,0) ∈ (2^{−j−1}, 2^{−j}].
    let level_of = |i: usize| -> i64 {
        let d = diff.dist_to_zero(i);
        let mut j = (-d.log2()).floor() as i64;
        while scale(j) < d {
            j -= 1;
        }
        while scale(j + 1) >= d {
            j += 1;
        }
        j
    };
    let max_level_of_f = (0..k)
        .filter(|&i| i != zero)
        .map(level_of)
        .max()
        .unwrap_or(j0);

    // Grow nets until all vectors are in and projections stabilize.
    let mut net: Vec<usize> = vec![zero];
    let mut levels: Vec<ChainLevel> = Vec::new();
    let mut prev_packing: Option<usize> = None;
    let mut j = j0;
    let mut j_all: Option<i64> = None;
    loop {
        let u = scale(j);
        // Greedy maximal extension preserving the previous net.
        for i in 0..k {
            if net.contains(&i) {
                continue;
            }
            if net.iter().all(|&g| dist[i][g] > u) {
                net.push(i);
            }
        }
        let packing = packing_number(&dist, u, mode)?.count;
        let frozen = prev_packing == Some(packing);
        let i_j = entropy_integral_between(&dist, u / 2.0, u, mode)? / n.sqrt();
        let prev_net: Vec<usize> = levels
            .last()
            .map(|l| l.net.clone())
            .unwrap_or_else(|| vec![zero]);
        let mut delta_pairs = Vec::new();
        for &g in &net {
            for &h in &prev_net {
                let d_gh = if g == h { 0.0 } else { dist[g][h] };
                if d_gh <= 4.0 * u {
                    delta_pairs.push((g, h));
                }
            }
        }
        levels.push(ChainLevel {
            j,
            net: net.clone(),
            packing,
            frozen,
            delta_pairs,
            i_j,
        });
        if net.len() == k && j_all.is_none() {
            j_all = Some(j);
        }
        // Stop once everything is in the net and every vector has passed
        // its own projection level (so chains have stabilized).
        if net.len() == k && j > max_level_of_f {
            break;
        }
        prev_packing = Some(packing);
        j += 1;
    }

    // Projections per representative per recorded level.
    let mut projections = vec![Vec::with_capacity(levels.len()); k];
    for i in 0..k {
        let own_level = if i == zero { i64::MAX } else { level_of(i) };
        for level in &levels {
            if level.j <= own_level {
                projections[i].push(zero);
            } else {
                // Nearest net point, ties broken by smallest representative
                // index (scan in index order with strict improvement).
                let mut sorted = level.net.clone();
                sorted.sort_unstable();
                let mut best = sorted[0];
                let mut best_d = if i == best { 0.0 } else { dist[i][best] };
                for &g in &sorted[1..] {
                    let d_ig = if g == i { 0.0 } else { dist[i][g] };
                    if d_ig < best_d {
                        best = g;
                        best_d = d_ig;
                    }
                }
                projections[i].push(best);
            }
        }
    }

    Ok(ChainingStructure {
        j0: Some(j0),
        levels,
        projections,
        packing_exact: mode == PackingMode::Exact,
    })
}

/// Φ(f,x,y) = K(β) n^{−1/2} ∫₀^{√(Wf)/2} √(log D(ℱ,u,d_{x,y})) du for
/// every function in the family (collided functions share a value).
///
/// Because d_{x,y}(f,0) = √(Wf)/2, the upper limit equals the distance of
/// the difference vector to zero.
pub fn phi_functional(family: &FunctionFamily, pair: &PairedSample, beta: f64) -> Result<Vec<f64>> {
    phi_functional_with_k(family, pair, k_beta(beta)?.k)
}

/// [`phi_functional`] with a precomputed constant K, so callers that
/// evaluate Φ over many (x, y) pairs pay for the K(β) bisection once.
pub fn phi_functional_with_k(
    family: &FunctionFamily,
    pair: &PairedSample,
    k: f64,
) -> Result<Vec<f64>> {
    family.require_zero()?;
    let diff = DifferenceSet::from_family(family, pair)?;
    let dist = diff.distance_matrix();
    let mode = if diff.len() <= MAX_EXACT_PACKING {
        PackingMode::Exact
    } else {
        PackingMode::Greedy
    };
    let n = diff.n() as f64;
    let mut per_rep = vec![0.0; diff.len()];
    for i in 0..diff.len() {
        let upper = diff.dist_to_zero(i);
        if upper > 0.0 {
            per_rep[i] = k / n.sqrt() * entropy_integral(&dist, upper, mode)?;
        }
    }
    Ok((0..family.len()).map(|f| per_rep[diff.rep_of(f)]).collect())
}

/// Verdict of the condition-(Phi) check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhiVerdict {
    Holds,
    Fails,
    /// MC estimate too close to 1−β to decide at the 1e-3 Hoeffding level.
    Inconclusive,
}

/// Result of checking P_ε(sup_ℱ (R_n f − Φ(f,x,y)) > 0) < 1 − β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiCheck {
    pub probability: f64,
    /// One-sided Hoeffding margin at level 1e-3 (0 in exhaustive mode).
    pub margin: f64,
    pub exhaustive: bool,
    pub verdict: PhiVerdict,
}

/// Checks condition (Phi) for a fixed (x, y): exact ε-enumeration when
/// 2^n ≤ `budget`, else seeded Monte Carlo over ε-replicates.
pub fn phi_condition_check(
    family: &FunctionFamily,
    pair: &PairedSample,
    beta: f64,
    trials: u64,
    seed: u64,
    budget: u128,
) -> Result<PhiCheck> {
    family.require_zero()?;
    let phi = phi_functional(family, pair, beta)?;
    let n = pair.n();
    let diff = DifferenceSet::from_family(family, pair)?;
    // One representative function per distinct difference vector suffices
    // for the supremum.
    let rep_fns: Vec<usize> = (0..diff.len()).map(|i| diff.owners(i)[0]).collect();
    let exceeds = |eps: &BitString| -> Result<bool> {
        for &f in &rep_fns {
            if r_n(family, f, pair, eps)? - phi[f] > 0.0 {
                return Ok(true);
            }
        }
        Ok(false)
    };
    let atoms = 1u128 << n.min(127);
    if n <= 20 && atoms <= budget {
        let mut hits: u64 = 0;
        for mask in 0..(1u64 << n) as u32 {
            let eps = BitString::new(n, mask)?;
            if exceeds(&eps)? {
                hits += 1;
            }
        }
        let probability = hits as f64 / (1u64 << n) as f64;
        let verdict = if probability < 1.0 - beta {
            PhiVerdict::Holds
        } else {
            PhiVerdict::Fails
        };
        Ok(PhiCheck {
            probability,
            margin: 0.0,
            exhaustive: true,
            verdict,
        })
    } else {
        if trials < 1000 {
            return Err(domain("mc condition check requires at least 1000 trials"));
        }
        if n > 32 {
            return Err(domain("sign vectors limited to n ≤ 32"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits: u64 = 0;
        for _ in 0..trials {
            let mask: u32 = if n == 32 {
                rng.gen()
            } else {
                rng.gen_range(0..1u32 << n)
            };
            let eps = BitString::new(n, mask)?;
            if exceeds(&eps)? {
                hits += 1;
            }
        }
        let probability = hits as f64 / trials as f64;
        // One-sided Hoeffding bound at level 1e-3.
        let margin = ((1000f64).ln() / (2.0 * trials as f64)).sqrt();
        let target = 1.0 - beta;
        let verdict = if probability + margin < target {
            PhiVerdict::Holds
        } else if probability - margin >= target {
            PhiVerdict::Fails
        } else {
            PhiVerdict::Inconclusive
        };
        Ok(PhiCheck {
            probability,
            margin,
            exhaustive: false,
            verdict,
        })
    }
}

/// Uniform-entropy upper bound on 𝔼_y Φ(f,x,y):
///
///   2 K(β) n^{−1/2} ∫₀^{√(Vf)/4} √(log D(ℱ,u)) du,
///
/// where `uniform_packing` is any nonincreasing upper bound on the
/// u-packing numbers over discrete L₂ measures (e.g. the polynomial VC
/// bound). The integral is an upper Riemann sum (left endpoints, with the
/// first panel evaluated just inside 0), so the returned value upper-bounds
/// the displayed integral for nonincreasing integrands.
pub fn uniform_entropy_phi_bound(
    family: &FunctionFamily,
    x: &Sample,
    mu: &FiniteDistribution,
    beta: f64,
    uniform_packing: &dyn Fn(f64) -> f64,
) -> Result<Vec<f64>> {
    let kb = k_beta(beta)?;
    let n = x.n() as f64;
    let mut out = Vec::with_capacity(family.len());
    for f in 0..family.len() {
        let upper = v_stat(family, f, x, mu).sqrt() / 4.0;
        if upper == 0.0 {
            out.push(0.0);
            continue;
        }
        let integral = packing_entropy_quad(uniform_packing, upper, QUAD_PANELS)?;
        out.push(2.0 * kb.k / n.sqrt() * integral);
    }
    Ok(out)
}

/// Panel count used by the quadrature of packing-bound entropy integrals.
pub const QUAD_PANELS: usize = 1 << 14;

/// Upper Riemann sum of ∫₀^upper √(log packing(u)) du over a fixed panel
/// grid (left endpoints; the first panel is evaluated just inside 0).
/// Over-estimates the integral for nonincreasing packing bounds, and —
/// because each panel evaluates at u = upper·(i/panels) — the normalized
/// value `result/upper` is nonincreasing in `upper`, exactly, which
/// downstream normalization arguments rely on.
pub fn packing_entropy_quad(
    uniform_packing: &dyn Fn(f64) -> f64,
    upper: f64,
    panels: usize,
) -> Result<f64> {
    if !(upper > 0.0) {
        return Err(domain("quadrature upper limit must be positive"));
    }
    let width = upper / panels as f64;
    let mut integral = 0.0;
    for i in 0..panels {
        let u = if i == 0 {
            width * 1e-6
        } else {
            i as f64 * width
        };
        let d = uniform_packing(u);
        if d < 1.0 {
            return Err(domain("uniform packing bound must be ≥ 1"));
        }
        if d > 1.0 {
            integral += width * d.ln().sqrt();
        }
    }
    Ok(integral)
}

/// Sanity helper: the polynomial VC packing bound as a closure suitable
/// for `uniform_entropy_phi_bound`.
pub fn vc_uniform_packing(d: u32) -> impl Fn(f64) -> f64 {
    move |u: f64| bounds::haussler_packing_bound(d, u).map_or(1.0, |v| v.max(1.0))
}
