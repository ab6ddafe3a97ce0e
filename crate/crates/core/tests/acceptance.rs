//! Acceptance suite: runs every verification check at its pinned tolerance
//! and prints one pass/fail line per criterion (visible with
//! `cargo test --test acceptance -- --nocapture`).

use sigmak::verify::{run_suite, Suite, Tolerances};

#[test]
fn acceptance_criteria() {
    let results = run_suite(Suite::All, 42, &Tolerances::default());
    let mut failures = Vec::new();
    for r in &results {
        println!("{} {} — {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        if !r.passed {
            failures.push(r.name.clone());
        }
    }
    println!("{} checks, {} failed", results.len(), failures.len());
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

#[test]
fn acceptance_is_seed_stable() {
    // Randomized suites must pass for more than the single default seed.
    for seed in [7u64, 20260808] {
        for suite in [Suite::Conservation, Suite::Classification] {
            let results = run_suite(suite, seed, &Tolerances::default());
            for r in &results {
                assert!(r.passed, "seed {seed}: {} — {}", r.name, r.detail);
            }
        }
    }
}
