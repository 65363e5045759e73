//! Binary-level tests of the CLI contract: exit codes (0 verified,
//! 1 verification failed, 2 usage/domain/parse), printed values, and
//! run-to-run determinism of report files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_concentra")
}

fn testdata(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn bound_prints_pinned_values() {
    let out = run(&["bound", "thm1", "--alpha", "1", "--t", "0"]);
    assert!(out.status.success());
    // 2^{α+1} e at α = 1, t = 0 is 4e = 10.8731…
    assert!(stdout_of(&out).contains("1.08731273138e1"), "{}", stdout_of(&out));

    let out = run(&["bound", "eb", "--var-sum", "1", "--n", "8", "--t", "1"]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("1.00000000000e0"));

    let out = run(&["bound", "kbeta", "--beta", "0.5"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("p = ") && text.contains("k = "));
}

#[test]
fn bound_domain_errors_exit_2() {
    // Missing flag.
    assert_eq!(run(&["bound", "thm1", "--t", "1"]).status.code(), Some(2));
    // Domain violation (optimized form needs t ≥ log 2).
    assert_eq!(run(&["bound", "thm1opt", "--t", "0.1"]).status.code(), Some(2));
    // Unknown subcommand.
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_bundled_specs_exit_0() {
    for (exp, file) in [
        ("thm1", "thm1_small.json"),
        ("symthm1", "symthm1_small.json"),
        ("cor2", "cor2_small.json"),
        ("thm2", "thm2_small.json"),
        ("cor4", "cor4_small.json"),
        ("eb", "eb_small.json"),
        ("prop1", "prop1_spec.json"),
        ("star", "star_spec.json"),
    ] {
        let spec = testdata(file);
        let out = run(&["verify", exp, "--spec", spec.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{exp} failed: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn verify_corrupted_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["verify", "thm1", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("nope.json");
    let out = run(&["verify", "thm1", "--spec", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_mc_rerun_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = testdata("symthm1_mc.json");
    let mut files = Vec::new();
    for (i, workers) in ["1", "2", "8"].iter().enumerate() {
        let out_path = dir.path().join(format!("report_{i}.csv"));
        let out = run(&[
            "verify",
            "symthm1",
            "--spec",
            spec.to_str().unwrap(),
            "--format",
            "csv",
            "--workers",
            workers,
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        files.push(std::fs::read(&out_path).unwrap());
    }
    assert_eq!(files[0], files[1], "reports must be byte-identical");
    assert_eq!(files[1], files[2], "reports must be byte-identical");
}

#[test]
fn verify_mc_matches_golden_file() {
    // Frozen on the first certified run; any drift in RNG streams,
    // aggregation order, or formatting shows up as a byte diff here.
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.csv");
    let out = run(&[
        "verify",
        "symthm1",
        "--spec",
        testdata("symthm1_mc.json").to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read(&out_path).unwrap(),
        std::fs::read(testdata("golden_symthm1_mc.csv")).unwrap(),
        "report drifted from the frozen golden file"
    );
}

#[test]
fn verify_csv_header_contract() {
    let spec = testdata("thm1_small.json");
    let out = run(&[
        "verify",
        "thm1",
        "--spec",
        spec.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(
        text.starts_with("experiment,t,probability,bound,slack,stderr,mode,seed"),
        "unexpected header: {}",
        text.lines().next().unwrap_or("")
    );
}

#[test]
fn cube_fc_two_point_instance() {
    let set = testdata("cube_event.json");
    let out = run(&["cube", "fc", "--set", set.to_str().unwrap(), "--eps", "10"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("fc_sq = 5.00000000000e-1"), "{text}");

    // Dimension mismatch is a usage error.
    let out = run(&["cube", "fc", "--set", set.to_str().unwrap(), "--eps", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chain_bundled_family_deterministic() {
    let family = testdata("family_threshold.json");
    let pair = testdata("pair_small.json");
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("chain1.json");
    let out2 = dir.path().join("chain2.json");
    for out_path in [&out1, &out2] {
        let out = run(&[
            "chain",
            "--family",
            family.to_str().unwrap(),
            "--pair",
            pair.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout_of(&out).contains("phi_condition: holds"));
    }
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out2).unwrap(),
        "chain output must be deterministic"
    );
}

#[test]
fn chain_missing_zero_function_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let family = dir.path().join("family.json");
    std::fs::write(
        &family,
        r#"{"probs":[0.5,0.5],"values":[[1.0,0.0]],"b":1.0}"#,
    )
    .unwrap();
    let out = run(&[
        "chain",
        "--family",
        family.to_str().unwrap(),
        "--pair",
        testdata("pair_small.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ci_interval_and_boundary() {
    let data = testdata("ci_bernoulli.csv");
    let out = run(&[
        "ci",
        "--data",
        data.to_str().unwrap(),
        "--column",
        "xi",
        "--t",
        "1",
        "--var",
        "0.25",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("mean = "));
    assert!(text.contains("sample_variance = "));
    assert!(text.contains("radius_sample_only"));
    assert!(text.contains("interval.lo"));

    // t at the n/4 boundary (n = 12 rows, t = 3) rejected.
    let out = run(&["ci", "--data", data.to_str().unwrap(), "--column", "xi", "--t", "3"]);
    assert_eq!(out.status.code(), Some(2));
}
