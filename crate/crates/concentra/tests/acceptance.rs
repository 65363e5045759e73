//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N (...): PASS` line (visible with `--nocapture`). Every
//! tolerance is pinned in the assertion itself.

use concentra::bounds;
use concentra::chaining::{build_chaining, k_beta, phi_condition_check, DifferenceSet, PhiVerdict};
use concentra::cube::{
    all_fc_squared, convex_distance, prop1_bound, sup_affine_eval, AffineSupFunctional, BitString,
    CubeEvent,
};
use concentra::process::{
    family_generators, v_stat, v_stat_enumerated, FamilyKind, FiniteDistribution, FunctionFamily,
    PairedSample, Sample,
};
use concentra::symmetrization::{normalized_statistic, sqrt_variational};
use concentra::verify::{
    cor2_experiment, eb_experiment, report_to_string, symmetrized_thm1_experiment,
    thm1_experiment, thm2_experiment, ExperimentSpec, ReportFormat,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::Instant;

const BUDGET: u128 = 2_000_000;

fn pass(n: usize, name: &str) {
    println!("criterion {n} ({name}): PASS");
}

fn random_event(rng: &mut ChaCha8Rng, n: usize, size: usize) -> CubeEvent {
    let mut members = BTreeSet::new();
    while members.len() < size {
        members.insert(rng.gen_range(0..1u32 << n));
    }
    CubeEvent::new(
        members
            .into_iter()
            .map(|m| BitString::new(n, m).unwrap())
            .collect(),
    )
    .unwrap()
}

fn spec_from_json(json: &str) -> ExperimentSpec {
    ExperimentSpec::from_json(json).unwrap()
}

/// Criterion 1: exhaustive convex-distance tails on 100 random events,
/// n = 10, α ∈ {0.5, 1, 2}, t ∈ {0,…,10}, slack ≥ −1e-12, < 60 s.
#[test]
fn criterion_1_convex_distance_tails() {
    let start = Instant::now();
    let n = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut events: Vec<CubeEvent> = Vec::new();
    // Required edge cases: a singleton and an exactly-half event.
    events.push(random_event(&mut rng, n, 1));
    events.push(
        CubeEvent::new((0..1u32 << (n - 1)).map(|m| BitString::new(n, m).unwrap()).collect())
            .unwrap(),
    );
    while events.len() < 100 {
        let size = rng.gen_range(1..=40);
        events.push(random_event(&mut rng, n, size));
    }
    let total = (1u32 << n) as f64;
    for event in &events {
        let fc2 = all_fc_squared(event).unwrap();
        let p_a = event.probability();
        for &alpha in &[0.5, 1.0, 2.0] {
            for t in 0..=10 {
                let t = t as f64;
                let probability = fc2.iter().filter(|&&v| v >= t).count() as f64 / total;
                let bound = prop1_bound(p_a, alpha, t);
                assert!(
                    bound - probability >= -1e-12,
                    "tail exceeds bound: p={probability} bound={bound} alpha={alpha} t={t}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "suite took {elapsed:?}");
    pass(1, "convex-distance tail suite");
}

/// Criterion 2: every minimum-norm computation carries a nonnegative
/// optimality certificate (≥ −1e-9) and a convex-weights witness that
/// reconstructs the point to 1e-9; pinned value fc² = 0.5 on the bundled
/// two-point instance.
#[test]
fn criterion_2_min_norm_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut checked = 0;
    for _ in 0..30 {
        let n = rng.gen_range(2..=8);
        let size = rng.gen_range(1..=12.min(1 << n));
        let event = random_event(&mut rng, n, size);
        let members: Vec<BitString> = event.members().collect();
        for _ in 0..20 {
            let eps = BitString::new(n, rng.gen_range(0..1u32 << n)).unwrap();
            let result = convex_distance(&event, &eps).unwrap();
            assert!(
                result.certificate_gap >= -1e-9,
                "certificate gap {} below tolerance",
                result.certificate_gap
            );
            // Witness reconstruction: the convex combination of
            // disagreement indicators reproduces the minimum-norm point.
            let mut rebuilt = vec![0.0f64; n];
            let mut weight_sum = 0.0;
            for &(idx, lambda) in &result.witness {
                weight_sum += lambda;
                let gen = members[idx].mask() ^ eps.mask();
                for (i, r) in rebuilt.iter_mut().enumerate() {
                    *r += lambda * ((gen >> i) & 1) as f64;
                }
            }
            assert!((weight_sum - 1.0).abs() <= 1e-9);
            for (a, b) in rebuilt.iter().zip(&result.point) {
                assert!((a - b).abs() <= 1e-9, "witness point mismatch");
            }
            checked += 1;
        }
    }
    assert!(checked >= 600);

    let event = CubeEvent::new(vec!["00".parse().unwrap(), "11".parse().unwrap()]).unwrap();
    let eps: BitString = "10".parse().unwrap();
    let result = convex_distance(&event, &eps).unwrap();
    assert!((result.fc_squared() - 0.5).abs() <= 1e-9);
    pass(2, "minimum-norm certificates");
}

/// Criterion 3: exact enumeration on ≥ 20 supremum-deviation specs
/// (m ≤ 3, n ≤ 8, |family| ≤ 6, singleton and zero families included):
/// both tails meet the α bound everywhere and the optimized form for
/// t ≥ log 2, slack ≥ −1e-12, < 120 s.
#[test]
fn criterion_3_supremum_deviation_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut specs: Vec<ExperimentSpec> = Vec::new();
    // Zero family and singleton families on two- and three-point spaces.
    specs.push(spec_from_json(
        r#"{"probs":[0.5,0.5],"values":[[0.0,0.0]],"n":6,"t_grid":[0.5,1.0,2.0,4.0]}"#,
    ));
    specs.push(spec_from_json(
        r#"{"probs":[0.5,0.5],"values":[[0.0,1.0]],"n":8,"t_grid":[0.5,1.0,2.0,4.0]}"#,
    ));
    specs.push(spec_from_json(
        r#"{"probs":[0.2,0.5,0.3],"values":[[0.5,-0.5,0.0]],"n":6,"t_grid":[0.5,1.0,2.0,4.0]}"#,
    ));
    // Random families: m ∈ {2, 3}, |family| ≤ 6, α ∈ {0.5, 1, 2}.
    while specs.len() < 20 {
        let m = rng.gen_range(2..=3usize);
        let n = if m == 3 { rng.gen_range(3..=5) } else { rng.gen_range(4..=8) };
        let count = rng.gen_range(1..=5usize);
        let family = family_generators(
            FamilyKind::FiniteRandom { count, b: 1.0 },
            m,
            rng.gen(),
        )
        .unwrap();
        let mut probs = vec![0.0; m];
        let mut total = 0.0;
        for p in probs.iter_mut() {
            *p = rng.gen_range(0.1..1.0);
            total += *p;
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        let alpha = [0.5, 1.0, 2.0][specs.len() % 3];
        specs.push(ExperimentSpec {
            probs,
            values: family.rows().to_vec(),
            b: None,
            vc_dim: None,
            n,
            t_grid: vec![0.5, bounds::LOG2, 1.0, 2.0, 4.0],
            alpha: Some(alpha),
            beta: None,
            mode: None,
            trials: None,
            seed: None,
        });
    }
    assert!(specs.len() >= 20);
    for spec in &specs {
        let report = thm1_experiment(spec, BUDGET).unwrap();
        for row in &report.rows {
            assert!(
                row.slack >= -1e-12,
                "violated: {} t={} slack={}",
                row.experiment,
                row.t,
                row.slack
            );
        }
        // The optimized form is checked whenever the grid reaches log 2.
        if spec.t_grid.iter().any(|&t| t >= bounds::LOG2) {
            assert!(report.rows.iter().any(|r| r.experiment.ends_with("_opt")));
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "suite took {elapsed:?}");
    pass(3, "supremum-deviation suite");
}

/// Criterion 4: algebraic identities — the closed-form mixed variance vs
/// its enumeration oracle (1e-12, ×100), the self-normalized statistic's
/// event equivalence (×1000), the √(ab) variational identity on a δ grid
/// (1e-9), and exact reflection symmetry of the affine supremum on
/// exhaustive cubes (n ≤ 10).
#[test]
fn criterion_4_identity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);

    // v_stat closed form vs 𝔼_y enumeration.
    for _ in 0..100 {
        let m = rng.gen_range(2..=4usize);
        let n = rng.gen_range(2..=5usize);
        let count = rng.gen_range(1..=4usize);
        let family =
            family_generators(FamilyKind::FiniteRandom { count, b: 1.0 }, m, rng.gen()).unwrap();
        let mut probs = vec![0.0; m];
        let mut total = 0.0;
        for p in probs.iter_mut() {
            *p = rng.gen_range(0.1..1.0);
            total += *p;
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        let mu = FiniteDistribution::new(probs).unwrap();
        let x = Sample::draw(&mu, n, &mut rng);
        let f = rng.gen_range(0..family.len());
        let closed = v_stat(&family, f, &x, &mu);
        let oracle = v_stat_enumerated(&family, f, &x, &mu);
        assert!(
            (closed - oracle).abs() <= 1e-12 * closed.abs().max(1.0),
            "v_stat mismatch: {closed} vs {oracle}"
        );
    }

    // Event equivalence: {statistic ≥ t} = {ξ₁ ≥ ξ₂ + √(ξ₃ t)}.
    for _ in 0..1000 {
        let xi1 = rng.gen_range(-2.0..2.0);
        let xi2 = rng.gen_range(-2.0..2.0);
        let xi3 = rng.gen_range(0.01..3.0);
        let t = rng.gen_range(1e-6..4.0);
        let stat = normalized_statistic(xi1, xi2, xi3).unwrap();
        assert_eq!(stat >= t, xi1 >= xi2 + (xi3 * t).sqrt());
    }

    // √(ab) = inf_δ (δa + b/(4δ)): grid minimum within 1e-9.
    for _ in 0..50 {
        let a = rng.gen_range(0.01..5.0);
        let b = rng.gen_range(0.01..5.0);
        let (value, argmin) = sqrt_variational(a, b).unwrap();
        let delta_star = argmin.unwrap();
        let mut grid_min = f64::INFINITY;
        for i in -200..=200 {
            let delta = delta_star * (1.0 + i as f64 * 1e-4);
            grid_min = grid_min.min(delta * a + b / (4.0 * delta));
        }
        assert!((grid_min - value).abs() <= 1e-9, "{grid_min} vs {value}");
        assert!(grid_min >= value - 1e-12, "infimum undercut");
    }

    // Reflection symmetry Φ'(ε) = Φ(1−ε), exact, exhaustive n ≤ 10.
    for _ in 0..10 {
        let n = rng.gen_range(2..=10usize);
        let count = rng.gen_range(1..=4usize);
        let offsets: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let slopes: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let f = AffineSupFunctional::new(offsets, slopes, 1.0).unwrap();
        let fc = f.complement();
        for mask in 0..1u32 << n {
            let eps = BitString::new(n, mask).unwrap();
            let lhs = sup_affine_eval(&fc, &eps).unwrap();
            let rhs = sup_affine_eval(&f, &eps.complement()).unwrap();
            assert_eq!(lhs.to_bits(), rhs.to_bits(), "reflection must be exact");
        }
    }
    pass(4, "identity suite");
}

/// Criterion 5: the sharpened deviation radius never exceeds the
/// comparison radius on a full 50³ log grid, and the closed-form radius
/// inverts the Bernstein exponent r²/(2𝔼V + 2r/3) = t to 1e-10 at b = ½.
#[test]
fn criterion_5_radius_comparison() {
    let grid: Vec<f64> = (0..50)
        .map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 49.0))
        .collect();
    for &ev in &grid {
        for &b in &grid {
            for &t in &grid {
                let ours = bounds::cor2_radius(ev, b, t).unwrap();
                let massart = bounds::massart_radius(ev, b, t).unwrap();
                assert!(
                    ours <= massart * (1.0 + 1e-12),
                    "radius comparison failed at ev={ev} b={b} t={t}: {ours} > {massart}"
                );
            }
        }
    }
    for &ev in &grid {
        for &t in &grid {
            let r = bounds::variance_radius(ev, 0.5, t).unwrap();
            let inverted = r * r / (2.0 * ev + 2.0 * r / 3.0);
            assert!(
                (inverted - t).abs() <= 1e-10 * t.max(1.0),
                "inversion failed at ev={ev} t={t}: {inverted}"
            );
        }
    }
    pass(5, "radius comparison suite");
}

/// Criterion 6: chaining-structure invariants on 50 random families
/// (≤ 12 functions, n ≤ 10) — separation, covering, nesting, step bound,
/// telescoping, |Δ_j| ≤ |F|², the proof's per-level entropy inequality
/// with exact packing — plus the β = ½ constant certificate p ∈ (2, 2.5).
#[test]
fn criterion_6_chaining_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..50 {
        let m = rng.gen_range(2..=5usize);
        let n = rng.gen_range(2..=10usize);
        let count = rng.gen_range(1..=11usize);
        let mut values: Vec<Vec<f64>> =
            vec![vec![0.0; m]]; // zero function always present
        for _ in 0..count {
            values.push((0..m).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
        let family = FunctionFamily::new(values, Some(1.0), None).unwrap();
        let mu = FiniteDistribution::uniform(m).unwrap();
        let pair = PairedSample::new(
            Sample::draw(&mu, n, &mut rng),
            Sample::draw(&mu, n, &mut rng),
        )
        .unwrap();
        let structure = build_chaining(&family, &pair, 0.5).unwrap();
        assert!(structure.packing_exact, "≤ 12 functions must pack exactly");
        let diff = DifferenceSet::from_family(&family, &pair).unwrap();
        let k = diff.len();
        let nf = pair.n() as f64;

        let mut prev_net: Vec<usize> = Vec::new();
        for (li, level) in structure.levels.iter().enumerate() {
            let u = 2f64.powi(-(level.j as i32));
            // Separation: net points strictly more than 2^{−j} apart.
            for (a, &ga) in level.net.iter().enumerate() {
                for &gb in level.net.iter().skip(a + 1) {
                    assert!(diff.dist(ga, gb) > u, "net not separated at level {}", level.j);
                }
            }
            // Covering: every vector within 2^{−j} of the net.
            for i in 0..k {
                let min = level
                    .net
                    .iter()
                    .map(|&g| diff.dist(i, g))
                    .fold(f64::INFINITY, f64::min);
                assert!(min <= u, "net not covering at level {}", level.j);
            }
            // Nesting: F_{j−1} ⊆ F_j.
            for g in &prev_net {
                assert!(level.net.contains(g), "nets must be nested");
            }
            prev_net = level.net.clone();
            // Net size bounded by the packing number; Δ_j bounded by |F|².
            assert!(level.net.len() <= level.packing);
            assert!(level.delta_pairs.len() <= k * k);
            // Step bound: consecutive projections within 2^{−j+2}.
            for proj in &structure.projections {
                if li > 0 {
                    let d = diff.dist(proj[li], proj[li - 1]);
                    assert!(
                        d <= 4.0 * u + 1e-15,
                        "projection step {d} exceeds 2^{{-j+2}} at level {}",
                        level.j
                    );
                }
            }
            // The proof's level inequality with exact packing numbers:
            // √n · I_j / 2^{−(j+1)} ≥ √(log D(2^{−j})).
            let lhs = nf.sqrt() * level.i_j / (u / 2.0);
            let rhs = (level.packing as f64).ln().sqrt();
            assert!(lhs >= rhs - 1e-9, "level inequality failed: {lhs} < {rhs}");
        }
        // Telescoping: the chain ends at the vector itself.
        if let Some(last) = structure.levels.len().checked_sub(1) {
            for (i, proj) in structure.projections.iter().enumerate() {
                assert_eq!(proj[last], i, "chain must terminate at the function");
            }
        }
    }

    let kb = k_beta(0.5).unwrap();
    assert!(kb.p > 2.0 && kb.p < 2.5, "p = {} out of range", kb.p);
    // Strict-sum certificate: Σ_{j≥2} j^{−p} < 1 − β, checked directly on
    // a partial sum plus an integral tail bound.
    let partial: f64 = (2..200_000u64).map(|j| (j as f64).powf(-kb.p)).sum();
    let tail = (200_000f64).powf(1.0 - kb.p) / (kb.p - 1.0);
    assert!(partial + tail < 0.5, "sum certificate violated");
    pass(6, "chaining invariants");
}

/// Criterion 7: the chaining-functional condition verifies exhaustively
/// (all ε, n ≤ 12) on every tested instance, and the chained deviation
/// experiment has slack ≥ −1e-12 in exact mode on ≥ 10 specs.
#[test]
fn criterion_7_phi_and_chained_deviation() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    // Exhaustive condition checks across family shapes and sizes.
    for kind in [FamilyKind::Threshold, FamilyKind::Interval] {
        for n in [6usize, 10, 12] {
            let m = rng.gen_range(3..=4usize);
            let family = family_generators(kind, m, rng.gen()).unwrap();
            let mu = FiniteDistribution::uniform(m).unwrap();
            let pair = PairedSample::new(
                Sample::draw(&mu, n, &mut rng),
                Sample::draw(&mu, n, &mut rng),
            )
            .unwrap();
            let check = phi_condition_check(&family, &pair, 0.5, 1000, 7, BUDGET).unwrap();
            assert!(check.exhaustive, "n ≤ 12 must enumerate all sign vectors");
            assert_eq!(check.verdict, PhiVerdict::Holds);
        }
    }

    // ≥ 10 exact chained-deviation specs.
    let mut specs: Vec<ExperimentSpec> = vec![
        spec_from_json(
            r#"{"probs":[0.5,0.5],"values":[[0.0,0.0]],"n":4,"t_grid":[1.0,2.0,4.0]}"#,
        ),
        spec_from_json(
            r#"{"probs":[0.3,0.4,0.3],
                "values":[[0.0,0.0,0.0],[1.0,0.0,0.0],[1.0,1.0,0.0],[1.0,1.0,1.0]],
                "n":4,"t_grid":[1.0,2.0,4.0]}"#,
        ),
    ];
    while specs.len() < 10 {
        let m = rng.gen_range(2..=3usize);
        let n = rng.gen_range(3..=4usize);
        let count = rng.gen_range(1..=3usize);
        let mut values = vec![vec![0.0; m]];
        for _ in 0..count {
            values.push((0..m).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
        let mut probs = vec![0.0; m];
        let mut total = 0.0;
        for p in probs.iter_mut() {
            *p = rng.gen_range(0.2..1.0);
            total += *p;
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        specs.push(ExperimentSpec {
            probs,
            values,
            b: None,
            vc_dim: None,
            n,
            t_grid: vec![1.0, 2.0, 4.0],
            alpha: None,
            beta: Some(0.5),
            mode: None,
            trials: None,
            seed: None,
        });
    }
    for spec in &specs {
        let report = thm2_experiment(spec, BUDGET).unwrap();
        for row in &report.rows {
            assert!(
                row.slack >= -1e-12,
                "chained deviation violated at t={}: slack {}",
                row.t,
                row.slack
            );
        }
    }
    pass(7, "condition check and chained deviation");
}

/// Criterion 8: exact Bernoulli coverage of the empirical-variance
/// interval for q ∈ {0.1, 0.5}, n ∈ {8, 12, 16}, t ∈ {1, 2}, bound
/// clamped at 1, < 5 s.
#[test]
fn criterion_8_empirical_bernstein_coverage() {
    let start = Instant::now();
    let dummy = spec_from_json(
        r#"{"probs":[0.5,0.5],"values":[[0.0,1.0]],"n":8,"t_grid":[1.0]}"#,
    );
    for &q in &[0.1f64, 0.5] {
        for &n in &[8u32, 12, 16] {
            for &t in &[1.0f64, 2.0] {
                if t < n as f64 / 4.0 {
                    let report = eb_experiment(q, n, &[t], &dummy).unwrap();
                    for row in &report.rows {
                        assert!(row.bound <= 1.0 + 1e-15, "bound must be clamped");
                        assert!(
                            row.slack >= -1e-12,
                            "coverage failed at q={q} n={n} t={}: p={} bound={}",
                            row.t,
                            row.probability,
                            row.bound
                        );
                    }
                } else {
                    // At t = n/4 the solved radius diverges (the interval is
                    // the whole line and coverage is trivial); check the
                    // pre-solved radius 2√((Var+Var_n+(q−ξ̄)²)t/n), which
                    // stays finite, by direct binomial enumeration.
                    let nf = n as f64;
                    let var = q * (1.0 - q);
                    let mut p_exceed = 0.0;
                    let mut log_c = 0.0f64;
                    for k in 0..=n as usize {
                        if k > 0 {
                            log_c += ((n as usize - k + 1) as f64).ln() - (k as f64).ln();
                        }
                        let w = (log_c
                            + k as f64 * q.ln()
                            + (n as usize - k) as f64 * (1.0 - q).ln())
                        .exp();
                        let mean = k as f64 / nf;
                        let var_n = mean * (1.0 - mean);
                        let dev = (mean - q).abs();
                        let radius = 2.0 * ((var + var_n + dev * dev) * t / nf).sqrt();
                        if dev > radius {
                            p_exceed += w;
                        }
                    }
                    let s = t.sqrt() - bounds::LOG2.sqrt();
                    let bound = bounds::clamp_prob(2.0 * (1.0 - s * s).exp());
                    assert!(
                        bound - p_exceed >= -1e-12,
                        "direct-form coverage failed at q={q} n={n} t={t}"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "suite took {elapsed:?}");
    pass(8, "empirical-variance coverage");
}

/// Criterion 9: Monte Carlo experiments are byte-identical across worker
/// counts for a fixed seed.
#[test]
fn criterion_9_worker_count_determinism() {
    let spec = spec_from_json(
        r#"{"probs":[0.2,0.5,0.3],"values":[[0.5,-0.5,0.0],[0.0,0.0,0.0]],
            "n":5,"t_grid":[0.5,1.0,2.0],"mode":"mc","trials":30000,"seed":99}"#,
    );
    let mut outputs: Vec<String> = Vec::new();
    for threads in [1usize, 2, 7] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let report = pool.install(|| symmetrized_thm1_experiment(&spec, BUDGET).unwrap());
        outputs.push(report_to_string(&[report], ReportFormat::Csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);

    // The exact-mode experiments are deterministic too (parallel map with
    // ordered aggregation); spot-check one.
    let exact = spec_from_json(
        r#"{"probs":[0.25,0.25,0.25,0.25],
            "values":[[0.0,0.0,0.0,0.0],[0.5,0.0,0.0,0.0],[0.5,0.5,0.0,0.0]],
            "b":0.5,"n":5,"t_grid":[1.0,2.0]}"#,
    );
    let r1 = cor2_experiment(&exact, BUDGET).unwrap();
    let r2 = {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        pool.install(|| cor2_experiment(&exact, BUDGET).unwrap())
    };
    assert_eq!(
        report_to_string(&[r1], ReportFormat::Csv).unwrap(),
        report_to_string(&[r2], ReportFormat::Csv).unwrap()
    );
    pass(9, "worker-count determinism");
}
