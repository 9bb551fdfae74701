mod corpus;

use proptest::prelude::*;
use watchat_core::lang::{parse, parse_expr, unparse};
use watchat_core::Program;

#[test]
fn canonical_text_of_golden_programs_is_a_fixpoint() {
    for src in corpus::all_programs() {
        let p = parse(src).unwrap();
        let once = unparse(&p.expr);
        let twice = unparse(&parse_expr(&once).unwrap());
        assert_eq!(once, twice, "{src}");
    }
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse("1 +\n  * 2").unwrap_err();
    assert_eq!((e.line, e.column), (2, 3));
    assert!(parse("x + 1").unwrap_err().is_unsupported());
    assert!(parse("  ").is_err());
}

proptest! {
    #[test]
    fn unparse_then_parse_is_a_fixpoint(choices in proptest::collection::vec(0usize..1000, 64), size in 1usize..=12) {
        let mut it = choices.into_iter().cycle();
        let src = corpus::gen::program(size, &mut |n| it.next().unwrap() % n);
        let p = parse(&src).unwrap();
        let canon = unparse(&p.expr);
        let again = parse_expr(&canon).unwrap();
        prop_assert!(again.same_shape(&p.expr), "{} vs {}", src, canon);
        prop_assert_eq!(unparse(&again), canon.clone());
        let rebuilt = Program::from_expr(again);
        prop_assert_eq!(rebuilt.source_of(&rebuilt.expr), canon.as_str());
    }

    #[test]
    fn parser_never_panics(src in "\\PC{0,40}") {
        let _ = parse(&src);
    }
}
