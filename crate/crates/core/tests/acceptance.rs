//! Acceptance criteria 1-9: one PASS/FAIL line per criterion, tolerances fixed in `verify`.

use loopalg::verify::{run_criterion, CheckResult, VerifyConfig};

fn report(id: u8) -> CheckResult {
    let result = run_criterion(id, &VerifyConfig::default()).expect("criterion id");
    let limit = result.runtime_limit.map(|l| format!(" (bound {l}s)")).unwrap_or_default();
    println!("{} [{:.2}s{}]", result.line(), result.elapsed, limit);
    result
}

fn assert_criterion(id: u8) {
    let result = report(id);
    assert!(result.passed, "criterion {id} failed: {}", result.line());
}

#[test]
fn criterion_1_diagonal_blocks() {
    assert_criterion(1);
}

#[test]
fn criterion_2_top_fourier_mode() {
    assert_criterion(2);
}

#[test]
fn criterion_3_appendix_b_routes() {
    assert_criterion(3);
}

#[test]
fn criterion_4_projector_suite() {
    assert_criterion(4);
}

#[test]
fn criterion_5_jordan_patterns() {
    assert_criterion(5);
}

#[test]
fn criterion_6_predicted_vs_detected() {
    assert_criterion(6);
}

#[test]
fn criterion_7_potts_three_way() {
    assert_criterion(7);
}

#[test]
fn criterion_8_boundary_partition_functions() {
    assert_criterion(8);
}

#[test]
fn criterion_9_oracle_equivalence() {
    assert_criterion(9);
}
