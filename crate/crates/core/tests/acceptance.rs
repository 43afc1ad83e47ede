//! One line per acceptance criterion, run with `--nocapture` to see them.

use eventzoom::verify;

fn run(id: &str) {
    let outcome = verify::run_one(id).unwrap_or_else(|| panic!("unknown criterion {id}"));
    println!("{outcome}");
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn interpolation() {
    run("interpolation");
}

#[test]
fn label_simplex() {
    run("label-simplex");
}

#[test]
fn coverage_oracle() {
    run("coverage-oracle");
}

#[test]
fn domain_equivalence() {
    run("domain-equivalence");
}

#[test]
fn ps_pp_equivalence() {
    run("ps-pp-equivalence");
}

#[test]
fn determinism() {
    run("determinism");
}

#[test]
fn identity_cases() {
    run("identity-cases");
}

#[test]
fn monotone_mixing() {
    run("monotone-mixing");
}

#[test]
fn codec_rng() {
    run("codec-rng");
}

#[test]
fn bench_sanity() {
    run("bench-sanity");
}

#[test]
fn every_criterion_has_a_test() {
    let ids: Vec<_> = verify::criteria().iter().map(|c| c.id).collect();
    assert_eq!(ids.len(), 10, "{ids:?}");
}
