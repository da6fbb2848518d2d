use std::time::Instant;

use riesz_core::selftest::{run, SUITES};

#[test]
fn every_suite_passes() {
    let mut failed = Vec::new();
    for name in SUITES {
        let start = Instant::now();
        let reports = run(name, 2024).expect("known suite");
        for r in reports {
            println!("{:<14} {:>6} cases  {:>7.2?}  {}", r.suite, r.cases, start.elapsed(), if r.passed() { "ok" } else { "FAIL" });
            if !r.passed() {
                failed.push(r);
            }
        }
    }
    assert!(failed.is_empty(), "{failed:#?}");
}
