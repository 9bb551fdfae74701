//! MAP inference of misconception sets, alternate candidates under the
//! distinctness constraint, and clarification questions.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::lang::{display_outcome, same_outcome, Outcome, Program};
use crate::misconceptions::{MisconceptionSet, PriorModel};
use crate::semantics::Explorer;

/// A misconception set together with the result it makes the user expect.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub set: MisconceptionSet,
    pub expected: Outcome,
    pub log_prior: f64,
    /// 1-based position in search order among accepted candidates.
    pub rank: usize,
}

impl Candidate {
    pub fn prior(&self) -> f64 {
        libm::exp(self.log_prior)
    }

    pub fn expected_display(&self) -> String {
        display_outcome(&self.expected)
    }
}

/// The most probable set (within `kappa` flags of the consulted closure)
/// under which `p` gives a different result.
pub fn infer_map(p: &Program, pm: &PriorModel, kappa: usize) -> Option<Candidate> {
    let mut ex = Explorer::new(p);
    search(&mut ex, pm, kappa, 1).into_iter().next()
}

/// Up to `max` candidates in search order. A set is accepted when it
/// diverges from the true result and, for every accepted set before it,
/// either gives a different expected result or is not a superset of it.
pub fn infer_all(p: &Program, pm: &PriorModel, kappa: usize, max: usize) -> Vec<Candidate> {
    let mut ex = Explorer::new(p);
    search(&mut ex, pm, kappa, max)
}

/// [`infer_all`] over an existing explorer, reusing its cached evaluations.
pub fn search(ex: &mut Explorer<'_>, pm: &PriorModel, kappa: usize, max: usize) -> Vec<Candidate> {
    let truth = ex.result(MisconceptionSet::EMPTY).clone();
    let closure = ex.closure(MisconceptionSet::EMPTY, kappa);
    let mut accepted: Vec<Candidate> = Vec::new();
    for set in pm.search_order(closure, kappa) {
        if accepted.len() >= max {
            break;
        }
        let out = ex.result(set);
        if same_outcome(out, &truth) {
            continue;
        }
        let distinct = accepted
            .iter()
            .all(|prev| !same_outcome(out, &prev.expected) || !prev.set.is_subset(set));
        if distinct {
            accepted.push(Candidate {
                set,
                expected: out.clone(),
                log_prior: pm.log_prior(set),
                rank: accepted.len() + 1,
            });
        }
    }
    accepted
}

/// Candidates grouped by expected result, each with its best set.
#[derive(Debug, Clone)]
pub struct Clarification {
    pub choices: Vec<Candidate>,
    pub question: String,
}

/// Groups candidates by expected result (keeping the most probable set per
/// group), orders the groups by that prior, and phrases the question.
/// Returns `None` when there is nothing to ask about.
pub fn clarify(cands: &[Candidate]) -> Option<Clarification> {
    let mut choices: Vec<Candidate> = Vec::new();
    for c in cands {
        match choices.iter_mut().find(|g| same_outcome(&g.expected, &c.expected)) {
            Some(g) if c.log_prior > g.log_prior || (c.log_prior == g.log_prior && c.rank < g.rank) => {
                *g = c.clone()
            }
            Some(_) => {}
            None => choices.push(c.clone()),
        }
    }
    if choices.is_empty() {
        return None;
    }
    choices.sort_by(|a, b| b.log_prior.partial_cmp(&a.log_prior).unwrap_or(core::cmp::Ordering::Equal).then(a.rank.cmp(&b.rank)));
    let shown: Vec<String> = choices.iter().map(|c| c.expected_display()).collect();
    let mut question = String::from("Did you expect ");
    for (i, s) in shown.iter().enumerate() {
        if i > 0 {
            question.push_str(if i + 1 == shown.len() { " or " } else { ", " });
        }
        let _ = write!(question, "{s}");
    }
    question.push('?');
    Some(Clarification { choices, question })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown expectation: {0}")]
pub struct UnknownExpectation(pub String);

/// The best candidate for the expectation the user picked.
pub fn resolve<'c>(cands: &'c [Candidate], chosen: &Outcome) -> Result<&'c Candidate, UnknownExpectation> {
    cands
        .iter()
        .filter(|c| same_outcome(&c.expected, chosen))
        .min_by(|a, b| b.log_prior.partial_cmp(&a.log_prior).unwrap_or(core::cmp::Ordering::Equal).then(a.rank.cmp(&b.rank)))
        .ok_or_else(|| UnknownExpectation(display_outcome(chosen)))
}

/// Like [`resolve`], keyed by the expectation's display text.
pub fn resolve_display<'c>(cands: &'c [Candidate], chosen: &str) -> Result<&'c Candidate, UnknownExpectation> {
    cands
        .iter()
        .filter(|c| c.expected_display() == chosen)
        .min_by(|a, b| b.log_prior.partial_cmp(&a.log_prior).unwrap_or(core::cmp::Ordering::Equal).then(a.rank.cmp(&b.rank)))
        .ok_or_else(|| UnknownExpectation(String::from(chosen)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, JsValue};
    use alloc::vec;

    fn cands(src: &str) -> Vec<Candidate> {
        infer_all(&parse(src).unwrap(), &PriorModel::default(), 3, 8)
    }

    fn shown(cs: &[Candidate]) -> Vec<(String, Vec<u8>)> {
        cs.iter().map(|c| (c.expected_display(), c.set.indices())).collect()
    }

    #[test]
    fn zero_indexing_is_the_map_explanation() {
        let p = parse("[2, 7, 1, 8].sort()[1]").unwrap();
        let c = infer_map(&p, &PriorModel::default(), 3).unwrap();
        assert_eq!(c.set, MisconceptionSet::of(&[11]));
        assert_eq!(c.expected_display(), "1");
        let all = cands("[2, 7, 1, 8].sort()[1]");
        assert_eq!(shown(&all), vec![("1".into(), vec![11])]);
        assert_eq!(clarify(&all).unwrap().question, "Did you expect 1?");
    }

    #[test]
    fn lexicographic_sort_at_index_zero() {
        // Under a uniform prior {11} precedes {14} and reads index 0 as
        // out of range; the lexicographic explanation comes second.
        let all = cands("[3, 4, 11, 10].sort()[0]");
        assert_eq!(shown(&all), vec![("undefined".into(), vec![11]), ("3".into(), vec![14])]);
        let pm = PriorModel::default().with_override(crate::MisconceptionId::SORT_IS_NUMERIC, 0.3).unwrap();
        let c = infer_map(&parse("[3, 4, 11, 10].sort()[0]").unwrap(), &pm, 3).unwrap();
        assert_eq!((c.set, c.expected_display()), (MisconceptionSet::of(&[14]), "3".into()));
    }

    #[test]
    fn three_expectations_at_index_one() {
        let all = cands("[3, 4, 11, 10].sort()[1]");
        assert_eq!(
            shown(&all),
            vec![("10".into(), vec![11]), ("4".into(), vec![14]), ("3".into(), vec![11, 14])]
        );
        assert_eq!(clarify(&all).unwrap().question, "Did you expect 10, 4 or 3?");
        assert_eq!(resolve(&all, &Ok(JsValue::Number(4.0))).unwrap().set, MisconceptionSet::of(&[14]));
        assert_eq!(resolve(&all, &Ok(JsValue::Number(3.0))).unwrap().set, MisconceptionSet::of(&[11, 14]));
        assert!(resolve(&all, &Ok(JsValue::Number(99.0))).is_err());
        assert_eq!(resolve_display(&all, "10").unwrap().set, MisconceptionSet::of(&[11]));
    }

    #[test]
    fn nothing_to_explain_for_literals() {
        assert!(infer_map(&parse("true").unwrap(), &PriorModel::default(), 3).is_none());
        assert!(cands("5").is_empty());
        assert!(clarify(&[]).is_none());
    }

    #[test]
    fn identical_expectations_form_one_group() {
        let a = Candidate { set: MisconceptionSet::of(&[1]), expected: Ok(JsValue::Null), log_prior: -1.0, rank: 1 };
        let b = Candidate { set: MisconceptionSet::of(&[2]), expected: Ok(JsValue::Null), log_prior: -1.0, rank: 2 };
        let c = clarify(&[a, b]).unwrap();
        assert_eq!(c.choices.len(), 1);
        assert_eq!(c.choices[0].set, MisconceptionSet::of(&[1]));
        assert_eq!(c.question, "Did you expect null?");
    }

    #[test]
    fn map_is_invariant_under_uniform_scaling() {
        let p = parse("[3, 4, 11, 10].sort()[1]").unwrap();
        let a = infer_map(&p, &PriorModel::uniform(0.1).unwrap(), 3).unwrap();
        let b = infer_map(&p, &PriorModel::uniform(0.05).unwrap(), 3).unwrap();
        assert_eq!(a.set, b.set);
    }
}
