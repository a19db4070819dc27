//! One line per acceptance criterion, then a single assertion over all of them.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use sparsebound::harness::suites::{run_suite, suite_names};

/// Runtime budget per criterion, in seconds. Printed, not asserted.
const BUDGETS: [f64; 11] = [1.0, 10.0, 30.0, 20.0, 60.0, 120.0, 60.0, 10.0, 30.0, 10.0, 30.0];

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for (id, name) in suite_names() {
        let start = Instant::now();
        let o = run_suite(id);
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {id:>2} {name:<24} {} | {} | {secs:.2}s (budget {}s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.summary,
            BUDGETS[id - 1]
        );
        if !o.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
