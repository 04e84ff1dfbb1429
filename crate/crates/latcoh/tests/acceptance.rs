//! Acceptance gate: the ten numbered criteria at full corpus sizes and
//! stated tolerances.  Each test prints one pass/fail line (visible with
//! `--nocapture`; always shown for failures) and asserts the verdict, so
//! `cargo test --test acceptance` is the complete go/no-go check.

fn check(id: usize) {
    let r = latcoh::selftest::run_criterion(id, false);
    println!(
        "criterion {:2} {:<45} {}  [{:8.2}s]  {}",
        r.id,
        r.name,
        if r.pass { "PASS" } else { "FAIL" },
        r.wall_time_s,
        r.detail
    );
    assert!(r.pass, "criterion {} ({}) failed: {}", r.id, r.name, r.detail);
}

#[test]
fn criterion_01_riemann_roch_residuals() {
    check(1);
}

#[test]
fn criterion_02_poisson_duality() {
    check(2);
}

#[test]
fn criterion_03_theta_golden_values() {
    check(3);
}

#[test]
fn criterion_04_harder_narasimhan_oracle() {
    check(4);
}

#[test]
fn criterion_05_effective_vanishing_inequalities() {
    check(5);
}

#[test]
fn criterion_06_vanishing_limit_under_twists() {
    check(6);
}

#[test]
fn criterion_07_rank1_zeta_vs_completed_zeta() {
    check(7);
}

#[test]
fn criterion_08_rank2_residue_at_one() {
    check(8);
}

#[test]
fn criterion_09_rank2_path_independence() {
    check(9);
}

#[test]
fn criterion_10_extremal_duality_and_boundedness() {
    check(10);
}
