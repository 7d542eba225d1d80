//! Acceptance suite: every release gate runs here, one pass/fail line per
//! criterion. Run with `cargo test -p augur --test acceptance -- --nocapture`
//! to see the lines as they complete.

use augur_core::verify::{
    criterion_five_layer, criterion_k_restricted, criterion_leaf_adjacent, criterion_lp,
    criterion_path_family, criterion_reduction_equivalence, criterion_rounding,
    criterion_structural, criterion_witness_bound, CriterionResult,
};

const SEED: u64 = 2024;

fn jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}

#[test]
fn acceptance_criteria() {
    let jobs = jobs();
    let runs: Vec<CriterionResult> = vec![
        criterion_five_layer().expect("criterion 1 runs"),
        criterion_path_family().expect("criterion 2 runs"),
        criterion_witness_bound(500, 300, SEED, jobs).expect("criterion 3 runs"),
        criterion_leaf_adjacent(200, SEED, jobs).expect("criterion 4 runs"),
        criterion_reduction_equivalence(100, SEED, jobs).expect("criterion 5 runs"),
        criterion_k_restricted(100, SEED, jobs).expect("criterion 6 runs"),
        criterion_lp(50, SEED, jobs, 6).expect("criterion 7 runs"),
        criterion_rounding(100, 4, SEED, jobs).expect("criterion 8 runs"),
        criterion_structural(SEED).expect("criterion 9 runs"),
    ];
    let mut failures = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        println!("criterion {}: {}", i + 1, r.line());
        if !r.passed {
            failures.push(format!("criterion {} failed: {}", i + 1, r.line()));
        }
        if !r.within_budget() {
            failures.push(format!(
                "criterion {} over budget: {} ms >= {} ms",
                i + 1,
                r.millis,
                r.budget_millis
            ));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
