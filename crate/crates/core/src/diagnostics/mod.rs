//! Diagnostic questions: programs whose output reveals whether the reader
//! holds one particular misconception. Includes a bounded verifier and an
//! enumerative synthesizer.

pub mod synth;

use alloc::vec::Vec;

use crate::lang::{same_outcome, Outcome, Program};
use crate::misconceptions::{MisconceptionId, MisconceptionSet};
use crate::semantics::Explorer;
use synth::{enumerate, Step};

/// Why a counterexample breaks the diagnostic's biconditional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// The set holds the target but does not produce the distractor.
    FalseNegative,
    /// The set lacks the target yet produces the distractor.
    FalsePositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Ok,
    Counterexample { set: MisconceptionSet, violation: Violation },
}

impl Verification {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verification::Ok)
    }
}

/// Checks that, for every set of at most `kappa_v` flags from the consulted
/// closure that avoids `exclude`, `p` gives the target's distractor exactly
/// when the set contains `m`. Sets are tried smallest first.
pub fn verify_diagnostic(p: &Program, m: MisconceptionId, kappa_v: usize, exclude: MisconceptionSet) -> Verification {
    let mut ex = Explorer::new(p);
    verify_with(&mut ex, m, kappa_v, exclude)
}

fn verify_with(ex: &mut Explorer<'_>, m: MisconceptionId, kappa_v: usize, exclude: MisconceptionSet) -> Verification {
    let target = MisconceptionSet::single(m);
    let distractor = ex.result(target).clone();
    if same_outcome(&distractor, ex.result(MisconceptionSet::EMPTY)) {
        return Verification::Counterexample { set: target, violation: Violation::FalseNegative };
    }
    let closure = ex.closure(MisconceptionSet::EMPTY, kappa_v).difference(exclude);
    for set in closure.subsets_up_to(kappa_v) {
        let gives = same_outcome(ex.result(set), &distractor);
        let holds = set.contains(m);
        if gives != holds {
            let violation = if holds { Violation::FalseNegative } else { Violation::FalsePositive };
            return Verification::Counterexample { set, violation };
        }
    }
    Verification::Ok
}

/// An output some other set of misconceptions leads to.
#[derive(Debug, Clone)]
pub struct Distractor {
    pub set: MisconceptionSet,
    pub value: Outcome,
}

#[derive(Debug, Clone)]
pub struct DiagnosticQuestion {
    pub target: MisconceptionId,
    pub program: Program,
    pub truth: Outcome,
    /// The output under the target flag alone.
    pub distractor: Outcome,
    /// Further distinct outputs under sets of at most two flags.
    pub extras: Vec<Distractor>,
    pub verified_bound: usize,
}

impl DiagnosticQuestion {
    /// The primary distractor followed by the extras.
    pub fn distractors(&self) -> Vec<Distractor> {
        let mut all = alloc::vec![Distractor { set: MisconceptionSet::single(self.target), value: self.distractor.clone() }];
        all.extend(self.extras.iter().cloned());
        all
    }
}

/// Packages `p` as a question for `m` if it verifies.
pub fn question_for(p: Program, m: MisconceptionId, kappa_v: usize, exclude: MisconceptionSet) -> Result<DiagnosticQuestion, Verification> {
    let mut ex = Explorer::new(&p);
    let v = verify_with(&mut ex, m, kappa_v, exclude);
    if !v.is_ok() {
        return Err(v);
    }
    let truth = ex.result(MisconceptionSet::EMPTY).clone();
    let distractor = ex.result(MisconceptionSet::single(m)).clone();
    let mut extras: Vec<Distractor> = Vec::new();
    let closure = ex.closure(MisconceptionSet::EMPTY, kappa_v).difference(exclude);
    for set in closure.subsets_up_to(2) {
        let out = ex.result(set);
        let fresh = !same_outcome(out, &truth)
            && !same_outcome(out, &distractor)
            && extras.iter().all(|d| !same_outcome(out, &d.value));
        if fresh {
            extras.push(Distractor { set, value: out.clone() });
        }
    }
    drop(ex);
    Ok(DiagnosticQuestion { target: m, program: p, truth, distractor, extras, verified_bound: kappa_v })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    /// Largest AST size enumerated.
    pub budget: usize,
    pub kappa_v: usize,
    /// Flags assumed absent; sets containing them are not checked.
    pub exclude: MisconceptionSet,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions { budget: 7, kappa_v: crate::DEFAULT_KAPPA, exclude: MisconceptionSet::EMPTY }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisFailure {
    /// No enumerated program separated the target from the other single
    /// flags.
    #[error("budget exhausted after {candidates_examined} candidates")]
    BudgetExhausted { candidates_examined: u64 },
    /// Programs isolating the target alone existed, but every one was
    /// spoiled by a combination involving the `blocking` flags.
    #[error("entangled with {blocking} ({near_misses} near misses)")]
    Entangled { near_misses: u64, blocking: MisconceptionSet },
    #[error("cancelled")]
    Cancelled,
}

#[derive(Debug, Clone)]
pub struct InventoryEntry {
    pub target: MisconceptionId,
    pub result: Result<DiagnosticQuestion, SynthesisFailure>,
    /// Milliseconds from the start of the run until the entry was settled,
    /// as reported by the caller's clock.
    pub elapsed_ms: u64,
}

/// The first enumerated program that verifies as a diagnostic for `m`.
pub fn synthesize_diagnostic(m: MisconceptionId, opts: &SynthesisOptions) -> Result<DiagnosticQuestion, SynthesisFailure> {
    let mut entries = synthesize_many(&[m], opts, &mut || 0);
    entries.pop().expect("one entry per target").result
}

/// Synthesizes a diagnostic for every registry id.
pub fn build_inventory(opts: &SynthesisOptions, clock: &mut dyn FnMut() -> u64) -> Vec<InventoryEntry> {
    let all: Vec<MisconceptionId> = MisconceptionId::all().collect();
    synthesize_many(&all, opts, clock)
}

/// Shares one enumeration among several targets. Each target gets the
/// first verifying program in enumeration order, exactly as if it had been
/// synthesized on its own.
pub fn synthesize_many(targets: &[MisconceptionId], opts: &SynthesisOptions, clock: &mut dyn FnMut() -> u64) -> Vec<InventoryEntry> {
    synthesize_until(targets, opts, clock, &|| false)
}

/// [`synthesize_many`] that gives up, reporting unsettled targets as
/// cancelled, once `cancelled` returns true. It is polled per candidate.
pub fn synthesize_until(
    targets: &[MisconceptionId],
    opts: &SynthesisOptions,
    clock: &mut dyn FnMut() -> u64,
    cancelled: &dyn Fn() -> bool,
) -> Vec<InventoryEntry> {
    struct Open {
        target: MisconceptionId,
        near_misses: u64,
        blocking: MisconceptionSet,
        found: Option<(DiagnosticQuestion, u64)>,
    }
    let mut open: Vec<Open> = targets
        .iter()
        .map(|&target| Open { target, near_misses: 0, blocking: MisconceptionSet::EMPTY, found: None })
        .collect();
    let mut remaining = open.len();
    let mut stopped = false;

    let examined = if remaining == 0 {
        0
    } else {
        enumerate(opts.budget, |sig, expr, _| {
            if cancelled() {
                stopped = true;
                return Step::Stop;
            }
            for o in open.iter_mut().filter(|o| o.found.is_none()) {
                if opts.exclude.contains(o.target) || !sig.isolates(o.target, opts.exclude) {
                    continue;
                }
                let p = Program::from_expr(expr());
                match question_for(p, o.target, opts.kappa_v, opts.exclude) {
                    Ok(q) => {
                        o.found = Some((q, clock()));
                        remaining -= 1;
                    }
                    Err(Verification::Counterexample { set, .. }) => {
                        o.near_misses += 1;
                        o.blocking = o.blocking.union(set.without(o.target));
                    }
                    Err(Verification::Ok) => unreachable!(),
                }
            }
            if remaining == 0 {
                Step::Stop
            } else {
                Step::Continue
            }
        })
    };

    let end = clock();
    open.into_iter()
        .map(|o| match o.found {
            Some((q, at)) => InventoryEntry { target: o.target, result: Ok(q), elapsed_ms: at },
            None => {
                let failure = if stopped {
                    SynthesisFailure::Cancelled
                } else if o.near_misses > 0 {
                    SynthesisFailure::Entangled { near_misses: o.near_misses, blocking: o.blocking }
                } else {
                    SynthesisFailure::BudgetExhausted { candidates_examined: examined }
                };
                InventoryEntry { target: o.target, result: Err(failure), elapsed_ms: end }
            }
        })
        .collect()
}
