//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line. All
//! comparisons are exact; the only tolerances are the runtime limits below.

use cartier_core::suites::*;
use cartier_core::{BaseDescriptor, FieldTower};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

const LIMIT_EXACT_TOP_FORMS: Duration = Duration::from_secs(10);
const LIMIT_HP_ROUNDTRIP: Duration = Duration::from_secs(30);
const LIMIT_HP1_EXHAUSTIVE: Duration = Duration::from_secs(1);
const LIMIT_TRACE_AXIOMS: Duration = Duration::from_secs(20);
const LIMIT_WEIERSTRASS: Duration = Duration::from_secs(30);
const LIMIT_SOLVERS: Duration = Duration::from_secs(10);
const LIMIT_T_POWER: Duration = Duration::from_secs(5);

fn tower(p: u64, base: BaseDescriptor, laurent: &[&str]) -> Arc<FieldTower> {
    FieldTower::new(p, base, laurent.iter().map(|s| s.to_string()).collect(), 16).unwrap()
}

fn finite(q: u64) -> BaseDescriptor {
    BaseDescriptor::FiniteField { order: q, modulus: None }
}

fn frac(q: u64, vars: &[&str]) -> BaseDescriptor {
    BaseDescriptor::RationalFunctions { order: q, variables: vars.iter().map(|s| s.to_string()).collect() }
}

fn summary(reports: &[SuiteReport]) -> String {
    reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .filter(|c| !c.passed())
        .map(|c| format!("{} {}/{}: {}", c.name, c.trials - c.failures, c.trials, c.first_failure.as_deref().unwrap_or("no trials")))
        .collect::<Vec<_>>()
        .join("; ")
}

fn verdict(n: u32, what: &str, reports: &[SuiteReport], elapsed: Duration, limit: Duration) {
    let trials: usize = reports.iter().map(|r| r.trials()).sum();
    let ok = reports.iter().all(|r| r.passed()) && elapsed < limit;
    let status = if ok { "PASS" } else { "FAIL" };
    let failures = summary(reports);
    println!(
        "{status} criterion {n}: {what}: {trials} trials, {:.3}s (limit {}s){}",
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if failures.is_empty() { String::new() } else { format!("; failing: {failures}") }
    );
    assert!(ok, "criterion {n} failed");
}

#[test]
fn criterion_1_exact_top_forms() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let reports = vec![
        exact_top_forms(&tower(2, frac(2, &["b"]), &[]), 500, &mut rng).unwrap(),
        exact_top_forms(&tower(3, frac(3, &["b1", "b2"]), &[]), 500, &mut rng).unwrap(),
    ];
    verdict(1, "exact top forms reduce to 0, representative = theta-zero part", &reports, start.elapsed(), LIMIT_EXACT_TOP_FORMS);
}

#[test]
fn criterion_2_hp_roundtrip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let reports = vec![
        hp_roundtrip(&tower(2, finite(4), &["t"]), 200, &mut rng).unwrap(),
        hp_roundtrip(&tower(2, finite(4), &["t1", "t2"]), 200, &mut rng).unwrap(),
        hp_roundtrip(&tower(3, finite(9), &["t"]), 200, &mut rng).unwrap(),
    ];
    verdict(2, "wedge dlog t roundtrip, additivity, wp-images vanish, all of Z/p reached", &reports, start.elapsed(), LIMIT_HP_ROUNDTRIP);
}

#[test]
fn criterion_3_hp1_exhaustive() {
    let start = Instant::now();
    let reports: Vec<SuiteReport> =
        [(2, 4), (2, 8), (3, 9)].iter().map(|&(p, q)| hp1_exhaustive(&tower(p, finite(q), &[])).unwrap()).collect();
    verdict(3, "hp1 class vanishes exactly on the brute-force wp-image of F_4, F_8, F_9", &reports, start.elapsed(), LIMIT_HP1_EXHAUSTIVE);
}

#[test]
fn criterion_4_trace_axioms() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let reports = vec![trace_axioms(200, &mut rng).unwrap()];
    verdict(4, "radicial and etale trace axioms, Tr dlog a = dlog b, surjectivity", &reports, start.elapsed(), LIMIT_TRACE_AXIOMS);
}

#[test]
fn criterion_5_weierstrass() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let reports = vec![weierstrass_suite(100, &mut rng).unwrap()];
    verdict(5, "division, schedule agreement, preparation, D = 16 consistency", &reports, start.elapsed(), LIMIT_WEIERSTRASS);
}

#[test]
fn criterion_6_solvers() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let reports = vec![solver_suite(100, &mut rng).unwrap()];
    verdict(6, "Artin-Schreier, Hensel/Vieta, unit-group congruence", &reports, start.elapsed(), LIMIT_SOLVERS);
}

#[test]
fn criterion_7_t_power_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let reports = vec![
        t_power_identity(&tower(3, finite(3), &["t"]), 200, &mut rng).unwrap(),
        t_power_identity(&tower(2, frac(2, &["b"]), &["t"]), 200, &mut rng).unwrap(),
    ];
    verdict(7, "d(t^p (1 + f)) = t^p df", &reports, start.elapsed(), LIMIT_T_POWER);
}

fn docs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

/// Runs the binary; stdout with `timing_us` zeroed, and the exit code.
fn cartier(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_cartier")).args(args).output().expect("run cartier");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 output");
    let normalized = stdout
        .lines()
        .map(|l| match l.split_once("\"timing_us\": ") {
            Some((head, _)) => format!("{head}\"timing_us\": 0"),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    (normalized, out.status.code().unwrap_or(-1))
}

#[test]
fn criterion_8_cli_examples() {
    let examples: [(&str, &[&str]); 3] = [
        ("hp-class.json", &["hp-class", "--tower", "GF(4)((t))", "--form", "(w + t^-2)*dlog(t)", "--format", "json"]),
        ("wdiv.json", &["wdiv", "--ring", "GF(5)[[u]][[T]] D=12", "--f", "T^2-u", "--g", "T^3", "--format", "json"]),
        ("check.json", &["check", "lemma-2-2-4", "--tower", "Frac GF(2)[b]", "--trials", "200", "--format", "json"]),
    ];
    let mut problems = Vec::new();
    for (file, args) in examples {
        let expected = std::fs::read_to_string(docs().join(file)).expect("documented example");
        let (got, code) = cartier(args);
        if got != expected {
            problems.push(format!("{file}: output differs:\n{got}"));
        }
        if code != 0 {
            problems.push(format!("{file}: exit code {code}"));
        }
        if cartier(args).0 != got {
            problems.push(format!("{file}: output is not deterministic"));
        }
    }
    let (_, code) = cartier(&["hp-class", "--tower", "Frac GF(2)[b]", "--form", "(b^3 + b + 1/b)*dlog(b)", "--format", "json"]);
    if code != 2 {
        problems.push(format!("rational-base hp-class exited with {code}, expected 2"));
    }
    let status = if problems.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "{status} criterion 8: documented json examples byte-for-byte (timing excluded), exit code 2 on a rational base{}",
        if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
    );
    assert!(problems.is_empty());
}
