//! A misconception-parameterized interpreter for a JavaScript subset,
//! with inference of the misconceptions behind a surprising result,
//! selective contrastive explanations, and diagnostic-program synthesis.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod explain;
pub mod inference;
pub mod lang;
pub mod misconceptions;
pub mod semantics;

pub use lang::{parse, JsValue, Outcome, Program};
pub use misconceptions::{MisconceptionId, MisconceptionSet, PriorModel};

/// Default cap on misconception-set size for closure and search.
pub const DEFAULT_KAPPA: usize = 3;
/// Default number of candidates returned by inference.
pub const DEFAULT_MAX_CANDIDATES: usize = 8;
