mod corpus;

use watchat_core::diagnostics::{
    build_inventory, synthesize_diagnostic, verify_diagnostic, SynthesisFailure, SynthesisOptions, Verification, Violation,
};
use watchat_core::lang::{display_outcome, parse};
use watchat_core::{MisconceptionId, MisconceptionSet};

fn id(i: u8) -> MisconceptionId {
    MisconceptionId::new(i).unwrap()
}

fn opts(budget: usize) -> SynthesisOptions {
    SynthesisOptions { budget, ..SynthesisOptions::default() }
}

#[test]
fn known_verification_examples() {
    let v = verify_diagnostic(&parse("([] || true)").unwrap(), id(4), 3, MisconceptionSet::EMPTY);
    let Verification::Counterexample { set, violation } = v else { panic!("expected a counterexample") };
    assert!(set.contains(id(18)) && !set.contains(id(4)));
    assert_eq!(violation, Violation::FalsePositive);
    let ok = verify_diagnostic(&parse(r#"([] ? [] : "abc")"#).unwrap(), id(4), 3, MisconceptionSet::EMPTY);
    assert_eq!(ok, Verification::Ok);
}

#[test]
fn string_concatenation_target() {
    let q = synthesize_diagnostic(id(8), &opts(3)).unwrap();
    // Same behavior class as ("10" + null): null's string form vanishes.
    let truth = display_outcome(&q.truth);
    let wrong = display_outcome(&q.distractor);
    assert!(truth.contains("null") && !wrong.contains("null"), "{truth} / {wrong}");
}

#[test]
fn string_subtraction_target() {
    let q = synthesize_diagnostic(id(23), &opts(3)).unwrap();
    assert_eq!((display_outcome(&q.truth).as_str(), display_outcome(&q.distractor).as_str()), ("0", "NaN"));
}

#[test]
fn indexing_target_reads_the_neighbor() {
    let q = synthesize_diagnostic(id(11), &opts(4)).unwrap();
    let e = watchat_core::semantics::evaluate(&q.program, MisconceptionSet::EMPTY);
    assert!(q.program.text.contains('['), "{}", q.program.text);
    assert!(e.consulted.contains(id(11)));
}

#[test]
fn typeof_target_needs_more_than_a_literal() {
    assert!(matches!(
        synthesize_diagnostic(MisconceptionId::TYPEOF_NULL_IS_NULL, &opts(1)),
        Err(SynthesisFailure::BudgetExhausted { .. })
    ));
}

#[test]
fn inventory_entries_reverify_and_are_reproducible() {
    let a = build_inventory(&opts(4), &mut || 0);
    let b = build_inventory(&opts(4), &mut || 0);
    assert_eq!(a.len(), 32);
    let mut found = 0;
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.target, y.target);
        match (&x.result, &y.result) {
            (Ok(q), Ok(r)) => {
                found += 1;
                assert_eq!(q.program.text, r.program.text);
                assert_eq!(verify_diagnostic(&q.program, q.target, q.verified_bound, MisconceptionSet::EMPTY), Verification::Ok);
                assert_ne!(display_outcome(&q.truth), display_outcome(&q.distractor));
                for d in &q.extras {
                    let shown = display_outcome(&d.value);
                    assert!(shown != display_outcome(&q.truth) && shown != display_outcome(&q.distractor));
                    assert!(d.set.len() <= 2);
                }
            }
            (Err(e), Err(f)) => assert_eq!(e, f),
            _ => panic!("non-deterministic outcome for {}", x.target),
        }
    }
    assert!(found >= 20, "only {found} found at budget 4");
}

#[test]
fn single_target_agrees_with_inventory() {
    let inv = build_inventory(&opts(4), &mut || 0);
    for i in [1u8, 13, 17, 25, 31] {
        let alone = synthesize_diagnostic(id(i), &opts(4)).unwrap();
        let shared = inv[usize::from(i) - 1].result.as_ref().unwrap();
        assert_eq!(alone.program.text, shared.program.text);
    }
}

#[test]
fn exclusion_rescues_a_masked_question() {
    let p = parse("([] || true)").unwrap();
    assert_eq!(verify_diagnostic(&p, id(4), 3, MisconceptionSet::of(&[18])), Verification::Ok);
}
