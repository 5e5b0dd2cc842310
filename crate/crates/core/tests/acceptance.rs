//! One test per acceptance criterion; each prints its PASS/FAIL line and
//! the numbers behind it.

use kthmax::acceptance::{run, Options, Profile};

fn criterion(id: u8) {
    let profile = match std::env::var("KTHMAX_ACCEPTANCE").as_deref() {
        Ok("quick") => Profile::Quick,
        _ => Profile::Full,
    };
    let r = run(id, &Options { profile, fixture: None });
    println!("{r}");
    assert!(r.passed, "criterion {id} failed:\n{r}");
}

#[test]
fn criterion_01_exactness_chain() {
    criterion(1);
}

#[test]
fn criterion_02_sampler_validity() {
    criterion(2);
}

#[test]
fn criterion_03_limit_law_convergence() {
    criterion(3);
}

#[test]
fn criterion_04_corollary_identities() {
    criterion(4);
}

#[test]
fn criterion_05_throughput_band() {
    criterion(5);
}

#[test]
fn criterion_06_effective_throughput_band() {
    criterion(6);
}

#[test]
fn criterion_07_bep_band() {
    criterion(7);
}

#[test]
fn criterion_08_consistency_suite() {
    criterion(8);
}

#[test]
fn criterion_09_ordering_transfer() {
    criterion(9);
}

#[test]
fn criterion_10_special_functions() {
    criterion(10);
}
