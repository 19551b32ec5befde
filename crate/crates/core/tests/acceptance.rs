//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use abelian_bf::abgroup::FgAbelianGroup;
use abelian_bf::bfcs::{partition_bf, partition_delta_route, partition_hom, Convention};
use abelian_bf::linalg::{smith_normal_form, IntMatrix};
use abelian_bf::manifolds::{catalog, lens_space};
use abelian_bf::suites::{
    back_to_cs_suite, census_grid, gauss_suite, normalization_bruteforce, tv_suite, FormPolicy,
};

struct Line {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (passed, detail) = f();
    Line {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

fn cli_partition(name: &str, k: u64) -> Option<String> {
    let out = Command::new(env!("CARGO_BIN_EXE_abelian-bf"))
        .args(["partition", "--catalog", name, "-k", &k.to_string(), "--json"])
        .output()
        .ok()?;
    if !out.status.success() {
        return None;
    }
    let doc: Value = serde_json::from_slice(&out.stdout).ok()?;
    doc["outputs"]["results"][0]["value"].as_str().map(str::to_string)
}

fn criterion_1() -> (bool, String) {
    let published = [("S3", "1"), ("RP3", "2"), ("L7_1", "7"), ("L2_1#L3_1", "6")];
    let mut bad = Vec::new();
    for (name, value) in published {
        if cli_partition(name, 1).as_deref() != Some(value) {
            bad.push(format!("{name} != {value}"));
        }
    }
    let entries = catalog();
    for m in &entries {
        let expected = m.h1().torsion_order().to_string();
        if cli_partition(&m.name, 1).as_deref() != Some(expected.as_str()) {
            bad.push(format!("{} != {expected}", m.name));
        }
    }
    (
        bad.is_empty(),
        format!(
            "{} catalog manifolds via the CLI; mismatches: {bad:?}",
            entries.len()
        ),
    )
}

fn criterion_2() -> (bool, String) {
    let mut cases = 0u64;
    let mut bad = Vec::new();
    for p in 2..=30u64 {
        for q in (1..p).filter(|q| q.gcd(&p) == 1) {
            let m = lens_space(p, q).expect("coprime");
            let h1 = m.h1();
            let form = m.require_form().expect("surgery form");
            for k in 1..=30u64 {
                cases += 1;
                let expected = BigUint::from(p * p.gcd(&k));
                let routes = [
                    partition_bf(&h1, k, Convention::TorsionOnly).value,
                    partition_hom(&h1, k, Convention::TorsionOnly).value,
                    partition_delta_route(&h1, form, k, Convention::TorsionOnly)
                        .map(|r| r.value)
                        .unwrap_or_default(),
                ];
                if routes.iter().any(|v| *v != expected) {
                    bad.push(format!("L({p},{q}) k={k}: {routes:?}"));
                }
            }
        }
    }
    (
        bad.is_empty(),
        format!("{cases} (p, q, k) triples x 3 routes; mismatches: {bad:?}"),
    )
}

fn criterion_3() -> (bool, String) {
    let ks: Vec<u64> = (1..=6).collect();
    match gauss_suite(
        200,
        &ks,
        FormPolicy {
            limit: 100,
            seed: 2024,
        },
    ) {
        Ok(r) => {
            let n = r.negative_controls.clone().expect("controls run");
            let example = n
                .examples
                .first()
                .map(|e| format!("{}: {}", e.case, e.detail))
                .unwrap_or_default();
            (
                r.passed(),
                format!(
                    "{} (form, k) cases, {} failures; degenerate controls failing with witness: {}/{} (e.g. {example})",
                    r.cases,
                    r.failures.len(),
                    n.detected,
                    n.cases
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn criterion_4() -> (bool, String) {
    match census_grid(6) {
        Ok(cases) => {
            let bad: Vec<String> = cases
                .iter()
                .filter(|c| !c.holds())
                .map(|c| {
                    format!(
                        "T={:?} b={} k={}: {} vs {}",
                        c.torsion, c.b, c.k, c.support, c.expected
                    )
                })
                .collect();
            let witnessed = cases.iter().filter(|c| c.not_rescaled_delta).count();
            let vacuous = cases.iter().filter(|c| c.k == 1 && c.b > 0).count();
            (
                bad.is_empty(),
                format!(
                    "{} cases, support = k^b prod gcd(k, p_i) everywhere; support > 1 witnessed in {witnessed}; \
                     {vacuous} cases with k = 1, b > 0 have support 1 since delta(1 B) = delta(B); failures: {bad:?}",
                    cases.len()
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn criterion_5() -> (bool, String) {
    let mut derived = 0;
    let mut inconsistent = Vec::new();
    for p in [2, 3] {
        let g = FgAbelianGroup::cyclic(p).expect("p >= 2");
        for c in normalization_bruteforce(&g, 6) {
            if c.derived.is_some() {
                derived += 1;
            }
            if !c.consistent {
                inconsistent.push(format!(
                    "{} {} k={}: {:?} vs {}",
                    c.group, c.form, c.k, c.derived, c.expected
                ));
            }
        }
    }
    if derived == 0 || !inconsistent.is_empty() {
        return (
            false,
            format!("normalization brute force: {derived} determinations, inconsistent: {inconsistent:?}"),
        );
    }
    match back_to_cs_suite(24, 6) {
        Ok(r) => (
            r.passed(),
            format!(
                "|G| |G[k]| recovered by brute force in {derived} (Z_2, Z_3) cases; {} (form, k) cases, {} failures",
                r.cases,
                r.failures.len()
            ),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn criterion_6() -> (bool, String) {
    match census_grid(6) {
        Ok(cases) => {
            let bad: Vec<String> = cases
                .iter()
                .filter(|c| !c.orders_agree)
                .map(|c| format!("T={:?} b={} k={}", c.torsion, c.b, c.k))
                .collect();
            (
                bad.is_empty(),
                format!(
                    "{} cases x 6 step orders equal to the closed-form support; failures: {bad:?}",
                    cases.len()
                ),
            )
        }
        Err(e) => (false, e.to_string()),
    }
}

fn criterion_7() -> (bool, String) {
    match tv_suite(10, 10) {
        Ok(r) => (
            r.passed(),
            format!(
                "{} (complex, k) cases, {} failures, {} brute-force counts skipped by the guard",
                r.cases,
                r.failures.len(),
                r.skipped
            ),
        ),
        Err(e) => (false, e.to_string()),
    }
}

fn criterion_8(property_time: Duration) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    let rows: Vec<Vec<i64>> = (0..300)
        .map(|_| (0..300).map(|_| rng.gen_range(-5..=5)).collect())
        .collect();
    let a = IntMatrix::from_rows(&rows);
    let start = Instant::now();
    let snf = smith_normal_form(&a);
    let snf_time = start.elapsed();
    let certified = snf.certifies(&a);
    let limit = Duration::from_secs(600);
    (
        snf_time < Duration::from_secs(10) && certified && property_time < limit,
        format!(
            "300x300 SNF in {:.2} s (rank {}, certified: {certified}); criteria 1-7 in {:.1} s",
            snf_time.as_secs_f64(),
            snf.rank,
            property_time.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let budgets = [
        Duration::from_secs(1),
        Duration::from_secs(10),
        Duration::from_secs(120),
        Duration::MAX,
        Duration::from_secs(300),
        Duration::MAX,
        Duration::MAX,
    ];
    let start = Instant::now();
    let mut lines = vec![
        timed(1, "partition at k = 1 equals |T_1|", criterion_1),
        timed(2, "lens spaces: three routes give p gcd(k, p)", criterion_2),
        timed(3, "torsion Gauss sums and degenerate controls", criterion_3),
        timed(4, "delta(k B) support census", criterion_4),
        timed(5, "finite BF / Chern-Simons relation", criterion_5),
        timed(6, "integration order independence", criterion_6),
        timed(7, "cocycle-count cross-check", criterion_7),
    ];
    for (line, budget) in lines.iter_mut().zip(budgets) {
        if line.elapsed > budget {
            line.passed = false;
            line.detail += &format!("; over the {} s budget", budget.as_secs());
        }
    }
    let property_time = start.elapsed();
    lines.push(timed(8, "exact SNF at scale and total runtime", || {
        criterion_8(property_time)
    }));

    let mut all = true;
    for l in &lines {
        all &= l.passed;
        println!(
            "criterion {} {} {} ({:.2} s): {}",
            l.id,
            if l.passed { "PASS" } else { "FAIL" },
            l.title,
            l.elapsed.as_secs_f64(),
            l.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
