//! One test per acceptance criterion; each prints its pass/fail line.

use srheat::acceptance;

fn check(id: u8) {
    let r = acceptance::run(id, false);
    println!("{r}");
    assert!(r.passed, "{r}");
}

#[test]
fn criterion_01_levy_area() {
    check(1);
}

#[test]
fn criterion_02_contact_constant() {
    check(2);
}

#[test]
fn criterion_03_riemannian() {
    check(3);
}

#[test]
fn criterion_04_cr_family() {
    check(4);
}

#[test]
fn criterion_05_steptwo_vs_kernel() {
    check(5);
}

#[test]
fn criterion_06_kernel_sanity() {
    check(6);
}

#[test]
fn criterion_07_free_lie_suite() {
    check(7);
}

#[test]
fn criterion_08_chen_suite() {
    check(8);
}

#[test]
fn criterion_09_pushforward_identity() {
    check(9);
}

#[test]
fn criterion_10_taylor_order() {
    check(10);
}

#[test]
fn criterion_11_filtration() {
    check(11);
}

#[test]
fn criterion_12_determinism() {
    check(12);
}
