//! The experiment harness: exact product-space enumeration and seeded
//! Monte Carlo estimation of every tail probability the library bounds,
//! compared row-by-row against the closed-form evaluators.
//!
//! Boundary convention: every checked event uses a strict inequality
//! (`>` rather than `≥`). The closed forms degenerate on the boundary for
//! zero-variance functionals (the zero function satisfies the non-strict
//! event identically), and the strict form is the one the control-by-two-
//! points argument actually certifies; it agrees with the non-strict form
//! in the limit through shrinking thresholds.
//!
//! Determinism: exact enumeration maps atoms in parallel but aggregates
//! the resulting per-atom values in fixed index order; Monte Carlo uses
//! counter-based seeding (one RNG stream per fixed-size replicate chunk),
//! so results are byte-identical for any worker count.

use crate::bounds;
use crate::chaining::{
    self, k_beta, packing_entropy_quad, phi_condition_check, phi_functional_with_k, PhiVerdict,
    QUAD_PANELS,
};
use crate::error::{domain, Error, Result};
use crate::process::{
    decode_atom, moments, uniform_v, uniform_w, v_stat, z_value, EvalMode, FamilyDocument,
    FiniteDistribution, FunctionFamily, PairedSample, Sample,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;

/// Default exact-enumeration budget in atoms.
pub const DEFAULT_BUDGET: u128 = 2_000_000;
/// Default Monte Carlo trial count.
pub const DEFAULT_TRIALS: u64 = 100_000;
/// Default RNG seed used when a spec leaves `seed` unset.
pub const DEFAULT_SEED: u64 = 271_828;
/// Replicates per MC chunk; each chunk gets its own RNG stream so the
/// estimate is independent of how chunks are scheduled across workers.
const MC_CHUNK: u64 = 1024;

/// The enumeration budget: `CONCENTRA_BUDGET` if set, else the default.
pub fn env_budget() -> u128 {
    std::env::var("CONCENTRA_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Experiment mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Mc => "mc",
        }
    }
}

/// A declarative experiment description, read from JSON. The family and
/// measure fields are flattened into the same document layout used
/// elsewhere (`probs`, `values`, `b`, `vc_dim`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub probs: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vc_dim: Option<u32>,
    pub n: usize,
    pub t_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_grid.is_empty() {
            return Err(domain("t_grid must be nonempty"));
        }
        if self.n == 0 {
            return Err(domain("sample size n must be positive"));
        }
        let _ = self.family_and_mu()?;
        Ok(())
    }

    pub fn family_and_mu(&self) -> Result<(FunctionFamily, FiniteDistribution)> {
        let doc = FamilyDocument {
            probs: self.probs.clone(),
            values: self.values.clone(),
            b: self.b,
            vc_dim: self.vc_dim,
        };
        FunctionFamily::from_document(&doc)
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Exact)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(1.0)
    }

    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(0.5)
    }

    pub fn trials(&self) -> u64 {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// SHA-256 of the canonical JSON serialization, as lowercase hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One checked tail: slack = bound − probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    /// Row-level experiment label (e.g. `thm1.upper`).
    pub experiment: String,
    pub t: f64,
    pub probability: f64,
    pub bound: f64,
    pub slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

impl TailRow {
    fn new(experiment: impl Into<String>, t: f64, probability: f64, bound: f64) -> Self {
        TailRow {
            experiment: experiment.into(),
            t,
            probability,
            bound,
            slack: bound - probability,
            stderr: None,
        }
    }

    fn with_stderr(mut self, stderr: f64) -> Self {
        self.stderr = Some(stderr);
        self
    }

    /// Exact rows must have slack ≥ −1e-12; MC rows get a 4-standard-error
    /// allowance.
    pub fn passes(&self) -> bool {
        match self.stderr {
            None => self.slack >= -1e-12,
            Some(se) => self.slack >= -(4.0 * se + 1e-12),
        }
    }
}

/// A full experiment report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub experiment: String,
    pub mode: String,
    pub seed: u64,
    pub spec_hash: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    pub rows: Vec<TailRow>,
}

impl TailReport {
    fn new(experiment: &str, spec: &ExperimentSpec) -> Self {
        TailReport {
            experiment: experiment.to_string(),
            mode: spec.mode().as_str().to_string(),
            seed: spec.seed(),
            spec_hash: spec.hash(),
            diagnostics: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn passes(&self) -> bool {
        self.rows.iter().all(TailRow::passes)
    }
}

/// Output format for [`report_emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Formats a float with 12 significant digits (stable across runs).
pub fn sig12(v: f64) -> String {
    format!("{v:.11e}")
}

/// Serializes reports deterministically. CSV columns are fixed:
/// `experiment,t,probability,bound,slack,stderr,mode,seed`.
pub fn report_emit<W: Write>(reports: &[TailReport], format: ReportFormat, w: &mut W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, reports)?;
            writeln!(w)?;
        }
        ReportFormat::Csv => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record([
                "experiment",
                "t",
                "probability",
                "bound",
                "slack",
                "stderr",
                "mode",
                "seed",
            ])?;
            for report in reports {
                for row in &report.rows {
                    csv.write_record([
                        row.experiment.as_str(),
                        &sig12(row.t),
                        &sig12(row.probability),
                        &sig12(row.bound),
                        &sig12(row.slack),
                        &row.stderr.map(sig12).unwrap_or_default(),
                        report.mode.as_str(),
                        &report.seed.to_string(),
                    ])?;
                }
            }
            csv.flush()?;
        }
    }
    Ok(())
}

pub fn report_to_string(reports: &[TailReport], format: ReportFormat) -> Result<String> {
    let mut buf = Vec::new();
    report_emit(reports, format, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

fn checked_atoms(m: usize, n: usize, budget: u128) -> Result<u64> {
    let atoms = (m as u128)
        .checked_pow(n as u32)
        .ok_or_else(|| domain("m^n overflows"))?;
    if atoms > budget {
        return Err(Error::Budget {
            needed: atoms,
            budget,
        });
    }
    Ok(atoms as u64)
}

/// Maps every atom index in parallel and returns the values in atom order
/// (deterministic aggregation regardless of worker count).
fn atom_map<T: Send, F: Fn(u64) -> T + Sync + Send>(atoms: u64, eval: F) -> Vec<T> {
    (0..atoms).into_par_iter().map(eval).collect()
}

/// Exact 𝔼 statistic(x) over Ω^n with product weights.
pub fn exact_expectation<F: Fn(&Sample) -> f64 + Sync>(
    mu: &FiniteDistribution,
    n: usize,
    statistic: F,
    budget: u128,
) -> Result<f64> {
    let atoms = checked_atoms(mu.m(), n, budget)?;
    let vals = atom_map(atoms, |a| {
        let (x, w) = decode_atom(a, mu.m(), n, mu);
        if w == 0.0 {
            0.0
        } else {
            w * statistic(&x)
        }
    });
    Ok(vals.iter().sum())
}

/// Exact P(statistic(x) ≥ threshold) over Ω^n.
pub fn exact_tail<F: Fn(&Sample) -> f64 + Sync>(
    mu: &FiniteDistribution,
    n: usize,
    statistic: F,
    threshold: f64,
    budget: u128,
) -> Result<f64> {
    let atoms = checked_atoms(mu.m(), n, budget)?;
    let vals = atom_map(atoms, |a| {
        let (x, w) = decode_atom(a, mu.m(), n, mu);
        if w > 0.0 && statistic(&x) >= threshold {
            w
        } else {
            0.0
        }
    });
    Ok(vals.iter().sum())
}

/// MC estimate of per-t event probabilities. `eval` receives a replicate
/// RNG and fills one bool per t. Chunked with one RNG stream per chunk,
/// so results are worker-count independent.
fn mc_event_probs<F>(trials: u64, seed: u64, t_count: usize, eval: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&mut ChaCha8Rng, &mut [bool]) + Sync,
{
    let chunks = trials.div_ceil(MC_CHUNK);
    let counts: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c + 1);
            let lo = c * MC_CHUNK;
            let hi = ((c + 1) * MC_CHUNK).min(trials);
            let mut counts = vec![0u64; t_count];
            let mut hits = vec![false; t_count];
            for _ in lo..hi {
                hits.iter_mut().for_each(|h| *h = false);
                eval(&mut rng, &mut hits);
                for (cnt, hit) in counts.iter_mut().zip(&hits) {
                    if *hit {
                        *cnt += 1;
                    }
                }
            }
            counts
        })
        .collect();
    let mut totals = vec![0u64; t_count];
    for chunk in counts {
        for (t, c) in totals.iter_mut().zip(chunk) {
            *t += c;
        }
    }
    let probs: Vec<f64> = totals.iter().map(|&c| c as f64 / trials as f64).collect();
    let stderrs = probs
        .iter()
        .map(|&p| (p * (1.0 - p) / trials as f64).sqrt())
        .collect();
    (probs, stderrs)
}

/// Exact 𝔼Z by enumeration.
fn exact_ez(
    family: &FunctionFamily,
    mu: &FiniteDistribution,
    n: usize,
    budget: u128,
) -> Result<f64> {
    exact_expectation(mu, n, |x| z_value(family, x), budget)
}

/// Both tails of the self-normalized deviation of Z:
///
///   P(Z > 𝔼Z + 2√(V(x)·t)) and P(Z < 𝔼Z − 2√(V(x)·t)),
///
/// with V(x) the mixed uniform variance, against 2^{α+1}e^{1−αt/(α+1)}
/// and, for t ≥ log 2, the optimized form 2e^{1−(√t−√log2)²}.
pub fn thm1_experiment(spec: &ExperimentSpec, budget: u128) -> Result<TailReport> {
    let (family, mu) = spec.family_and_mu()?;
    let n = spec.n;
    let alpha = spec.alpha();
    let mut report = TailReport::new("thm1", spec);
    let ez = exact_ez(&family, &mu, n, budget)?;

    // Per-atom (weight, Z, V) or per-replicate samples.
    let stats: Vec<(f64, f64, f64)> = match spec.mode() {
        Mode::Exact => {
            let atoms = checked_atoms(mu.m(), n, budget)?;
            atom_map(atoms, |a| {
                let (x, w) = decode_atom(a, mu.m(), n, &mu);
                if w == 0.0 {
                    return (0.0, 0.0, 0.0);
                }
                let v = uniform_v(&family, &x, &mu, EvalMode::Exact, budget)
                    .expect("budget checked above")
                    .value;
                (w, z_value(&family, &x), v)
            })
        }
        Mode::Mc => Vec::new(),
    };

    for &t in &spec.t_grid {
        let bound = bounds::thm1_bound(alpha, t)?;
        let bound_opt = if t >= bounds::LOG2 {
            Some(bounds::thm1_optimized(t)?)
        } else {
            None
        };
        match spec.mode() {
            Mode::Exact => {
                let mut upper = 0.0;
                let mut lower = 0.0;
                for &(w, z, v) in &stats {
                    if w == 0.0 {
                        continue;
                    }
                    let shift = 2.0 * (v * t).sqrt();
                    if z > ez + shift {
                        upper += w;
                    }
                    if z < ez - shift {
                        lower += w;
                    }
                }
                report.rows.push(TailRow::new("thm1.upper", t, upper, bound));
                report.rows.push(TailRow::new("thm1.lower", t, lower, bound));
                if let Some(b) = bound_opt {
                    report.rows.push(TailRow::new("thm1.upper_opt", t, upper, b));
                    report.rows.push(TailRow::new("thm1.lower_opt", t, lower, b));
                }
            }
            Mode::Mc => {}
        }
    }

    if spec.mode() == Mode::Mc {
        let t_grid = spec.t_grid.clone();
        let (probs, stderrs) = mc_event_probs(
            spec.trials(),
            spec.seed(),
            2 * t_grid.len(),
            |rng, hits| {
                let x = Sample::draw(&mu, n, rng);
                let z = z_value(&family, &x);
                let v = uniform_v(&family, &x, &mu, EvalMode::Exact, budget)
                    .expect("budget checked for exact inner enumeration")
                    .value;
                for (i, &t) in t_grid.iter().enumerate() {
                    let shift = 2.0 * (v * t).sqrt();
                    hits[2 * i] = z > ez + shift;
                    hits[2 * i + 1] = z < ez - shift;
                }
            },
        );
        for (i, &t) in t_grid.iter().enumerate() {
            let bound = bounds::thm1_bound(alpha, t)?;
            report.rows.push(
                TailRow::new("thm1.upper", t, probs[2 * i], bound).with_stderr(stderrs[2 * i]),
            );
            report.rows.push(
                TailRow::new("thm1.lower", t, probs[2 * i + 1], bound)
                    .with_stderr(stderrs[2 * i + 1]),
            );
        }
    }
    Ok(report)
}

/// The intermediate two-sample inequality behind the deviation bound:
///
///   P( sup Σf(xᵢ) > sup Σf(yᵢ) + 2√(W t) ) ≤ 2^{α+1} e^{−αt/(α+1)},
///
/// with W = sup_f Σ(f(xᵢ)−f(yᵢ))² (unnormalized).
pub fn symmetrized_thm1_experiment(spec: &ExperimentSpec, budget: u128) -> Result<TailReport> {
    let (family, mu) = spec.family_and_mu()?;
    let n = spec.n;
    let alpha = spec.alpha();
    let mut report = TailReport::new("symthm1", spec);

    let eval_pair = |pair: &PairedSample| -> (f64, f64, f64) {
        (
            z_value(&family, &pair.x),
            z_value(&family, &pair.y),
            uniform_w(&family, pair),
        )
    };

    match spec.mode() {
        Mode::Exact => {
            // Enumerate (x, y) jointly: m^{2n} atoms.
            let atoms = checked_atoms(mu.m(), 2 * n, budget)?;
            let m = mu.m() as u64;
            let half = m.pow(n as u32);
            let stats: Vec<(f64, f64, f64, f64)> = atom_map(atoms, |a| {
                let (x, wx) = decode_atom(a % half, mu.m(), n, &mu);
                let (y, wy) = decode_atom(a / half, mu.m(), n, &mu);
                let w = wx * wy;
                if w == 0.0 {
                    return (0.0, 0.0, 0.0, 0.0);
                }
                let pair = PairedSample { x, y };
                let (zx, zy, ww) = eval_pair(&pair);
                (w, zx, zy, ww)
            });
            for &t in &spec.t_grid {
                let bound = 2f64.powf(alpha + 1.0) * (-alpha * t / (alpha + 1.0)).exp();
                let mut p = 0.0;
                for &(w, zx, zy, ww) in &stats {
                    if w > 0.0 && zx > zy + 2.0 * (ww * t).sqrt() {
                        p += w;
                    }
                }
                report.rows.push(TailRow::new("symthm1", t, p, bound));
            }
        }
        Mode::Mc => {
            let t_grid = spec.t_grid.clone();
            let (probs, stderrs) =
                mc_event_probs(spec.trials(), spec.seed(), t_grid.len(), |rng, hits| {
                    let x = Sample::draw(&mu, n, rng);
                    let y = Sample::draw(&mu, n, rng);
                    let pair = PairedSample { x, y };
                    let (zx, zy, ww) = eval_pair(&pair);
                    for (i, &t) in t_grid.iter().enumerate() {
                        hits[i] = zx > zy + 2.0 * (ww * t).sqrt();
                    }
                });
            for (i, &t) in t_grid.iter().enumerate() {
                let bound = 2f64.powf(alpha + 1.0) * (-alpha * t / (alpha + 1.0)).exp();
                report
                    .rows
                    .push(TailRow::new("symthm1", t, probs[i], bound).with_stderr(stderrs[i]));
            }
        }
    }
    Ok(report)
}

/// Two-sided deviation of Z at the data-free radius built from 𝔼V:
///
///   P(|Z−𝔼Z| > 2√(t(𝔼V + deviation radius))) ≤ 4e^{1−(√t−√log2)²} + e^{−t},
///
/// for a family bounded by b and t ≥ log 2. 𝔼V is computed exactly.
pub fn cor2_experiment(spec: &ExperimentSpec, budget: u128) -> Result<TailReport> {
    let (family, mu) = spec.family_and_mu()?;
    let b = family
        .bound_b()
        .ok_or_else(|| domain("cor2 experiment requires a declared bound b"))?;
    if spec.t_grid.iter().any(|&t| t < bounds::LOG2) {
        return Err(domain("cor2 experiment requires t >= log 2"));
    }
    let n = spec.n;
    let mut report = TailReport::new("cor2", spec);
    let ez = exact_ez(&family, &mu, n, budget)?;
    let ev = exact_expectation(
        &mu,
        n,
        |x| {
            uniform_v(&family, x, &mu, EvalMode::Exact, budget)
                .expect("budget checked")
                .value
        },
        budget,
    )?;

    match spec.mode() {
        Mode::Exact => {
            let atoms = checked_atoms(mu.m(), n, budget)?;
            let stats: Vec<(f64, f64)> = atom_map(atoms, |a| {
                let (x, w) = decode_atom(a, mu.m(), n, &mu);
                if w == 0.0 {
                    (0.0, 0.0)
                } else {
                    (w, z_value(&family, &x))
                }
            });
            for &t in &spec.t_grid {
                let radius = bounds::cor2_radius(ev, b, t)?;
                let bound = bounds::cor2_rhs(t)?;
                let mut p = 0.0;
                for &(w, z) in &stats {
                    if w > 0.0 && (z - ez).abs() > radius {
                        p += w;
                    }
                }
                report.rows.push(TailRow::new("cor2", t, p, bound));
            }
        }
        Mode::Mc => {
            let t_grid = spec.t_grid.clone();
            let radii: Vec<f64> = t_grid
                .iter()
                .map(|&t| bounds::cor2_radius(ev, b, t))
                .collect::<Result<_>>()?;
            let (probs, stderrs) =
                mc_event_probs(spec.trials(), spec.seed(), t_grid.len(), |rng, hits| {
                    let x = Sample::draw(&mu, n, rng);
                    let z = z_value(&family, &x);
                    for (i, r) in radii.iter().enumerate() {
                        hits[i] = (z - ez).abs() > *r;
                    }
                });
            for (i, &t) in t_grid.iter().enumerate() {
                let bound = bounds::cor2_rhs(t)?;
                report
                    .rows
                    .push(TailRow::new("cor2", t, probs[i], bound).with_stderr(stderrs[i]));
            }
        }
    }
    Ok(report)
}

/// Per-atom ingredients of the chained deviation experiments: for every
/// function, Q_n f, V f, and the exact 𝔼_y Φ(f,x,y).
fn chained_atom_stats(
    family: &FunctionFamily,
    mu: &FiniteDistribution,
    x: &Sample,
    k: f64,
    budget: u128,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let n = x.n();
    let q: Vec<f64> = (0..family.len())
        .map(|f| moments(family, f, x, mu).q_n)
        .collect();
    let v: Vec<f64> = (0..family.len())
        .map(|f| v_stat(family, f, x, mu))
        .collect();
    let atoms = checked_atoms(mu.m(), n, budget)?;
    let mut eyphi = vec![0.0; family.len()];
    for a in 0..atoms {
        let (y, w) = decode_atom(a, mu.m(), n, mu);
        if w == 0.0 {
            continue;
        }
        let pair = PairedSample { x: x.clone(), y };
        let phi = phi_functional_with_k(family, &pair, k)?;
        for (acc, p) in eyphi.iter_mut().zip(&phi) {
            *acc += w * p;
        }
    }
    Ok((q, v, eyphi))
}

/// Certifies condition (Phi) on a handful of sampled (x, y) pairs; errors
/// on a hard "fails", records the holds-fraction as a diagnostic.
fn precheck_phi(
    family: &FunctionFamily,
    mu: &FiniteDistribution,
    n: usize,
    beta: f64,
    seed: u64,
    budget: u128,
    report: &mut TailReport,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let samples = 5;
    let mut holds = 0;
    for _ in 0..samples {
        let x = Sample::draw(mu, n, &mut rng);
        let y = Sample::draw(mu, n, &mut rng);
        let pair = PairedSample::new(x, y)?;
        let check = phi_condition_check(family, &pair, beta, 1000, seed, budget)?;
        match check.verdict {
            PhiVerdict::Fails => {
                return Err(Error::VerificationFailed(format!(
                    "condition (Phi) fails on a sampled pair: probability {}",
                    check.probability
                )))
            }
            PhiVerdict::Holds => holds += 1,
            PhiVerdict::Inconclusive => {}
        }
    }
    report
        .diagnostics
        .push(format!("phi_condition holds on {holds}/{samples} sampled pairs"));
    Ok(())
}

/// The chained self-normalized deviation of the empirical mean:
///
///   P(∃f: Q_n f > 𝔼_yΦ(f,x,y) + √(V f · t / n)) ≤ e^{1−(√t−√log(1/β))²},
///
/// for t ≥ log(1/β), with 𝔼_y Φ by exact inner enumeration.
pub fn thm2_experiment(spec: &ExperimentSpec, budget: u128) -> Result<TailReport> {
    let (family, mu) = spec.family_and_mu()?;
    family.require_zero()?;
    let beta = spec.beta();
    let n = spec.n;
    let kb = k_beta(beta)?;
    let mut report = TailReport::new("thm2", spec);
    precheck_phi(&family, &mu, n, beta, spec.seed(), budget, &mut report)?;

    let nf = n as f64;
    let exceeds = |q: &[f64], v: &[f64], eyphi: &[f64], t: f64| -> bool {
        (0..family.len()).any(|f| q[f] > eyphi[f] + (v[f] * t / nf).sqrt())
    };

    match spec.mode() {
        Mode::Exact => {
            let atoms = checked_atoms(mu.m(), n, budget)?;
            let stats: Vec<(f64, Vec<f64>, Vec<f64>, Vec<f64>)> = (0..atoms)
                .into_par_iter()
                .map(|a| {
                    let (x, w) = decode_atom(a, mu.m(), n, &mu);
                    if w == 0.0 {
                        return (0.0, Vec::new(), Vec::new(), Vec::new());
                    }
                    let (q, v, eyphi) = chained_atom_stats(&family, &mu, &x, kb.k, budget)
                        .expect("budget checked");
                    (w, q, v, eyphi)
                })
                .collect();
            for &t in &spec.t_grid {
                let bound = bounds::thm2_rhs(t, beta)?;
                let mut p = 0.0;
                for (w, q, v, eyphi) in &stats {
                    if *w > 0.0 && exceeds(q, v, eyphi, t) {
                        p += w;
                    }
                }
                report.rows.push(TailRow::new("thm2", t, p, bound));
            }
        }
        Mode::Mc => {
            let t_grid = spec.t_grid.clone();
            let (probs, stderrs) =
                mc_event_probs(spec.trials(), spec.seed(), t_grid.len(), |rng, hits| {
                    let x = Sample::draw(&mu, n, rng);
                    let (q, v, eyphi) = chained_atom_stats(&family, &mu, &x, kb.k, budget)
                        .expect("budget checked");
                    for (i, &t) in t_grid.iter().enumerate() {
                        hits[i] = exceeds(&q, &v, &eyphi, t);
                    }
                });
            for (i, &t) in t_grid.iter().enumerate() {
                let bound = bounds::thm2_rhs(t, beta)?;
                report
                    .rows
                    .push(TailRow::new("thm2", t, probs[i], bound).with_stderr(stderrs[i]));
            }
        }
    }
    Ok(report)
}

/// Per-family constant K for the variance-normalized deviation: the
/// smallest constant our uniform-entropy bound certifies, i.e. the max
/// over nonconstant f of the normalized entropy integral at the smallest
/// attainable scale √(4 Var f)/4, divided by √(d log n / n). The source
/// statement is existential in K; this computes a concrete witness.
pub fn cor4_constant(
    family: &FunctionFamily,
    mu: &FiniteDistribution,
    n: usize,
    beta: f64,
) -> Result<f64> {
    let d = family
        .vc_dim()
        .ok_or_else(|| domain("cor4 requires a declared VC dimension"))?;
    let kb = k_beta(beta)?;
    let nf = n as f64;
    let shape = (d as f64 * nf.ln() / nf).sqrt();
    let packing = chaining::vc_uniform_packing(d);
    let mut best: Option<f64> = None;
    for f in 0..family.len() {
        let var = {
            // Var f under μ, x-independent.
            let row = family.values_of(f);
            let p: f64 = row.iter().zip(mu.probs()).map(|(&v, &w)| v * w).sum();
            let second: f64 = row.iter().zip(mu.probs()).map(|(&v, &w)| v * v * w).sum();
            (second - p * p).max(0.0)
        };
        if var <= 0.0 {
            continue;
        }
        let v_min = 4.0 * var;
        let integral = packing_entropy_quad(&packing, v_min.sqrt() / 4.0, QUAD_PANELS)?;
        let k_f = 2.0 * kb.k / nf.sqrt() * integral / (v_min.sqrt() * shape);
        best = Some(best.map_or(k_f, |b: f64| b.max(k_f)));
    }
    best.ok_or_else(|| domain("cor4 requires at least one nonconstant function"))
}

/// The variance-normalized deviation for VC families:
///
///   P(∃ eligible f: Q_n f/√(V f) > K√(d log n/n) + √(t/n)) ≤
///   e^{1−(√t−√log(1/β))²},
///
/// with K from [`cor4_constant`]; functions with V f = 0 are excluded
/// (V = 0 forces f constant on the support, so Q_n f = 0 and the event is
/// vacuous).
pub fn cor4_experiment(spec: &ExperimentSpec, budget: u128) -> Result<TailReport> {
    let (family, mu) = spec.family_and_mu()?;
    let beta = spec.beta();
    let n = spec.n;
    let d = family
        .vc_dim()
        .ok_or_else(|| domain("cor4 requires a declared VC dimension"))?;
    let k = cor4_constant(&family, &mu, n, beta)?;
    let mut report = TailReport::new("cor4", spec);
    report.diagnostics.push(format!("computed K = {}", sig12(k)));

    let exceeds = |x: &Sample, t: f64| -> bool {
        let radius = bounds::cor4_radius(d, n as u32, t, k).expect("validated params");
        (0..family.len()).any(|f| {
            let v = v_stat(&family, f, x, &mu);
            v > 0.0 && moments(&family, f, x, &mu).q_n / v.sqrt() > radius
        })
    };

    match spec.mode() {
        Mode::Exact => {
            let atoms = checked_atoms(mu.m(), n, budget)?;
            for &t in &spec.t_grid {
                let bound = bounds::thm2_rhs(t, beta)?;
                let vals = atom_map(atoms, |a| {
                    let (x, w) = decode_atom(a, mu.m(), n, &mu);
                    if w > 0.0 && exceeds(&x, t) {
                        w
                    } else {
                        0.0
                    }
                });
                let p: f64 = vals.iter().sum();
                report.rows.push(TailRow::new("cor4", t, p, bound));
            }
        }
        Mode::Mc => {
            let t_grid = spec.t_grid.clone();
            let (probs, stderrs) =
                mc_event_probs(spec.trials(), spec.seed(), t_grid.len(), |rng, hits| {
                    let x = Sample::draw(&mu, n, rng);
                    for (i, &t) in t_grid.iter().enumerate() {
                        hits[i] = exceeds(&x, t);
                    }
                });
            for (i, &t) in t_grid.iter().enumerate() {
                let bound = bounds::thm2_rhs(t, beta)?;
                report
                    .rows
                    .push(TailRow::new("cor4", t, probs[i], bound).with_stderr(stderrs[i]));
            }
        }
    }
    Ok(report)
}

/// The one-function empirical-variance interval for a Bernoulli(q) mean:
///
///   P(|ξ̄ − q| > 2√((Var ξ + Var_n ξ)·t/(n − 4t))) ≤ 2e^{1−(√t−√log2)²}
///
/// (bound clamped at 1), checked by exact binomial enumeration grouped by
/// success count. Also reports the pre-solved display with radius
/// 2√((Var + Var_n + (q−ξ̄)²)t/n) against the same bound.
pub fn eb_experiment(q: f64, n: u32, t_grid: &[f64], spec: &ExperimentSpec) -> Result<TailReport> {
    if !(0.0..=1.0).contains(&q) {
        return Err(domain("Bernoulli parameter must lie in [0,1]"));
    }
    if t_grid.is_empty() {
        return Err(domain("t_grid must be nonempty"));
    }
    if t_grid.iter().any(|&t| t >= n as f64 / 4.0) {
        return Err(domain("eb experiment requires t < n/4"));
    }
    let mut report = TailReport::new("eb", spec);
    let var = q * (1.0 - q);
    let nf = n as f64;

    // Binomial weights C(n,k) q^k (1−q)^{n−k}.
    let mut weights = vec![0.0f64; n as usize + 1];
    for (k, w) in weights.iter_mut().enumerate() {
        let mut log_c = 0.0;
        for i in 0..k {
            log_c += ((n as usize - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        let log_p = if q > 0.0 { k as f64 * q.ln() } else { if k == 0 { 0.0 } else { f64::NEG_INFINITY } };
        let log_1p = if q < 1.0 {
            (n as usize - k) as f64 * (1.0 - q).ln()
        } else if k == n as usize {
            0.0
        } else {
            f64::NEG_INFINITY
        };
        *w = (log_c + log_p + log_1p).exp();
    }

    for &t in t_grid {
        // 2 e^{1−(√t−√log2)²}, clamped to 1.
        let s = t.sqrt() - bounds::LOG2.sqrt();
        let bound = bounds::clamp_prob(2.0 * (1.0 - s * s).exp());
        let mut p_solved = 0.0;
        let mut p_direct = 0.0;
        for k in 0..=n as usize {
            let w = weights[k];
            if w == 0.0 {
                continue;
            }
            let mean = k as f64 / nf;
            let var_n = mean * (1.0 - mean);
            let dev = (mean - q).abs();
            let r_solved = bounds::eb_radius(var + var_n, n, t)?;
            if dev > r_solved {
                p_solved += w;
            }
            let r_direct = 2.0 * ((var + var_n + dev * dev) * t / nf).sqrt();
            if dev > r_direct {
                p_direct += w;
            }
        }
        report.rows.push(TailRow::new("eb", t, p_solved, bound));
        report.rows.push(TailRow::new("eb.direct", t, p_direct, bound));
    }
    Ok(report)
}

/// Dispatch for eb when driven by a spec: the spec's measure must be a
/// two-point law on {0,1} and the family the coordinate identity.
pub fn eb_experiment_from_spec(spec: &ExperimentSpec) -> Result<TailReport> {
    let (_, mu) = spec.family_and_mu()?;
    if mu.m() != 2 {
        return Err(domain(
            "eb experiment expects a two-point (Bernoulli) ground space",
        ));
    }
    eb_experiment(mu.prob(1), spec.n as u32, &spec.t_grid, spec)
}
