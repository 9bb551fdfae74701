//! Brute-force reference for candidate search: every set of at most
//! `kappa` flags out of all 32, in cardinality-then-lexicographic order.

use watchat_core::lang::{display_outcome, parse, same_outcome, Outcome};
use watchat_core::misconceptions::MisconceptionSet;
use watchat_core::semantics::evaluate_untraced;

fn sets(kappa: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..kappa {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(1, |&l: &u8| l + 1);
            for f in start..=32u8 {
                let mut t = s.clone();
                t.push(f);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// (flag indices, expected display) of each accepted candidate.
pub fn candidates(src: &str, kappa: usize, max: usize) -> Vec<(Vec<u8>, String)> {
    let p = parse(src).unwrap();
    let truth = evaluate_untraced(&p, MisconceptionSet::EMPTY).result;
    let mut accepted: Vec<(Vec<u8>, Outcome)> = Vec::new();
    for s in sets(kappa) {
        if accepted.len() == max {
            break;
        }
        let out = evaluate_untraced(&p, MisconceptionSet::of(&s)).result;
        if same_outcome(&out, &truth) {
            continue;
        }
        let ok = accepted
            .iter()
            .all(|(prev, r)| !same_outcome(&out, r) || !prev.iter().all(|f| s.contains(f)));
        if ok {
            accepted.push((s, out));
        }
    }
    accepted.into_iter().map(|(s, r)| (s, display_outcome(&r))).collect()
}
