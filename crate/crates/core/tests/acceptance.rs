//! Reproduction criteria at CI scale; one line per criterion.
//! `GKCODE_LEVEL=deep` switches on the long-running searches.

use gk_core::acceptance::{run_criterion, Level};

fn level() -> Level {
    match std::env::var("GKCODE_LEVEL").as_deref() {
        Ok("deep") => Level::Deep,
        _ => Level::Ci,
    }
}

fn criterion(id: u8) {
    let outcome = run_criterion(id, level(), None).expect("criterion ran");
    println!("{outcome}");
    assert!(outcome.passed(), "{outcome}");
}

#[test]
fn criterion_01_curve_census() {
    criterion(1);
}

#[test]
fn criterion_02_coordinate_zero_sets() {
    criterion(2);
}

#[test]
fn criterion_03_secant_census() {
    criterion(3);
}

#[test]
fn criterion_04_conic_bounds() {
    criterion(4);
}

#[test]
fn criterion_05_cubic_configuration() {
    criterion(5);
}

#[test]
fn criterion_06_distance_classification() {
    criterion(6);
}

#[test]
fn criterion_07_secant_weight_counts() {
    criterion(7);
}

#[test]
fn criterion_08_toy_solution_counts() {
    criterion(8);
}

#[test]
fn criterion_09_mixed_support_exclusion() {
    criterion(9);
}

#[test]
fn criterion_10_existence_witnesses() {
    criterion(10);
}
