//! Evaluation under `Σ_M`: the true semantics when `M` is empty, the
//! misinterpreter for `M` otherwise.

mod eval;
mod ops;
mod trace;

pub use eval::{evaluate, evaluate_untraced};
pub(crate) use eval::eval_given;
pub use trace::{Coercion, CoercionKind, EvalOutcome, TraceStep};

use crate::lang::{Outcome, Program};
use crate::misconceptions::MisconceptionSet;
use hashbrown::HashMap;

/// Memoized untraced evaluations of one program across misconception sets.
pub struct Explorer<'p> {
    program: &'p Program,
    cache: HashMap<MisconceptionSet, (Outcome, MisconceptionSet)>,
}

impl<'p> Explorer<'p> {
    pub fn new(program: &'p Program) -> Self {
        Explorer { program, cache: HashMap::new() }
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    fn entry(&mut self, m: MisconceptionSet) -> &(Outcome, MisconceptionSet) {
        let program = self.program;
        self.cache.entry(m).or_insert_with(|| {
            let out = evaluate_untraced(program, m);
            (out.result, out.consulted)
        })
    }

    pub fn result(&mut self, m: MisconceptionSet) -> &Outcome {
        &self.entry(m).0
    }

    pub fn consulted(&mut self, m: MisconceptionSet) -> MisconceptionSet {
        self.entry(m).1
    }

    /// Least fixpoint of the consulted sets over `seed ∪ S` for every subset
    /// `S` of the current closure with at most `cap` members.
    pub fn closure(&mut self, seed: MisconceptionSet, cap: usize) -> MisconceptionSet {
        let mut closure = self.consulted(seed);
        loop {
            let mut grown = closure;
            for s in closure.subsets_up_to(cap) {
                grown = grown.union(self.consulted(seed.union(s)));
            }
            if grown == closure {
                return closure;
            }
            closure = grown;
        }
    }

    pub fn evaluations(&self) -> usize {
        self.cache.len()
    }
}

/// See [`Explorer::closure`].
pub fn consulted_closure(p: &Program, seed: MisconceptionSet, cap: usize) -> MisconceptionSet {
    Explorer::new(p).closure(seed, cap)
}
